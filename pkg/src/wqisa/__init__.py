"""Weighted quasi-interpolant spline approximation of noisy 2.5D point clouds.

The surface is a tensor-product B-spline whose coefficients are weighted
averages of cloud heights around each knot average; no linear system is
solved.  The package bundles the spline core, the weight functions and
estimator, an exact planar k-d tree, a multilevel B-spline baseline,
evaluation metrics, the data-driven fitting pipeline, synthetic data
generators, and file formats plus a CLI.
"""

__version__ = "0.1.0"

from .clouds import as_cloud, bounding_box
from .splines import (
    KnotVector,
    OutOfDomainError,
    TensorSplineSpace,
    WqisaSurface,
    basis_value,
    element_of,
    evaluate_surface,
    insert_knot,
    insert_knot_surface,
    knot_averages,
    local_basis_value,
)
from .weights import (
    WeightSpec,
    ZeroWeightError,
    estimate_all_coefficients,
    estimate_control_point,
    fit_surface,
    weight_gaussian,
    weight_idw,
    weight_indicator,
    weight_knn,
)
from .kdtree import PlanarIndex, build
from .mba import MbaSurface, dyadic_space, fit_mba, mba_level_coefficients
from .metrics import (
    ElementErrorMap,
    ErrorStats,
    gmse,
    hausdorff,
    linf_gridded,
    lmse,
    punctual_errors,
    surface_sample_points,
)
from .pipeline import (
    DataSplit,
    FitConfig,
    FitReport,
    cross_validate,
    fit,
    fit_split,
    kfold_splits,
    knn_parameter_grid,
    refine_mesh,
    split,
    tune_parameters,
)
from .synthetic import hemisphere_cloud, hemisphere_height, perturb
from .io import (
    CloudParseError,
    ConfigError,
    RunConfig,
    format_config,
    load_surface,
    parse_config,
    read_cloud,
    read_config,
    save_surface,
    write_cloud,
    write_config,
    write_surface_grid,
)
from .cli import cli_main

__all__ = [
    "__version__",
    "as_cloud",
    "bounding_box",
    "KnotVector",
    "OutOfDomainError",
    "TensorSplineSpace",
    "WqisaSurface",
    "basis_value",
    "element_of",
    "evaluate_surface",
    "insert_knot",
    "insert_knot_surface",
    "knot_averages",
    "local_basis_value",
    "WeightSpec",
    "ZeroWeightError",
    "estimate_all_coefficients",
    "estimate_control_point",
    "fit_surface",
    "weight_gaussian",
    "weight_idw",
    "weight_indicator",
    "weight_knn",
    "PlanarIndex",
    "build",
    "MbaSurface",
    "dyadic_space",
    "fit_mba",
    "mba_level_coefficients",
    "ElementErrorMap",
    "ErrorStats",
    "gmse",
    "hausdorff",
    "linf_gridded",
    "lmse",
    "punctual_errors",
    "surface_sample_points",
    "DataSplit",
    "FitConfig",
    "FitReport",
    "cross_validate",
    "fit",
    "fit_split",
    "kfold_splits",
    "knn_parameter_grid",
    "refine_mesh",
    "split",
    "tune_parameters",
    "hemisphere_cloud",
    "hemisphere_height",
    "perturb",
    "CloudParseError",
    "ConfigError",
    "RunConfig",
    "format_config",
    "load_surface",
    "parse_config",
    "read_cloud",
    "read_config",
    "save_surface",
    "write_cloud",
    "write_config",
    "write_surface_grid",
    "cli_main",
]
