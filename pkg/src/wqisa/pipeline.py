"""Data-driven fitting: splitting, tuning, refinement loop, assessment.

The fit starts from a one-element mesh over the data bounding box, then
alternates two moves until validation error stops improving: pick the weight
parameter minimizing the global mean squared error (GMSE) on the validation
set, and split every mesh element whose local error exceeds a threshold by
inserting its midpoints into both knot vectors.  The surface returned is the
iterate fitted just before the error rose.  Everything is deterministic
given the seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .clouds import as_cloud, bounding_box
from .metrics import ElementErrorMap, ErrorStats, gmse as surface_gmse, lmse
from .splines import TensorSplineSpace, WqisaSurface, insert_knot
from .weights import WeightSpec, ZeroWeightError, fit_surface

DEFAULT_FRACTIONS = (0.5, 0.25, 0.25)

# relative GMSE improvement below which the loop is considered stalled
STAGNATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DataSplit:
    """Disjoint training / validation / test subsets of one cloud."""

    training: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    seed: int
    scheme: str

    def __post_init__(self) -> None:
        for name in ("training", "validation", "test"):
            object.__setattr__(self, name, as_cloud(getattr(self, name)))


def split(cloud, fractions: tuple[float, float, float] = DEFAULT_FRACTIONS, seed: int = 0) -> DataSplit:
    """Random disjoint split by uniform down-sampling at the given fractions.

    The training rows are drawn first; the complement is divided between
    validation and test in proportion to their fractions.  Deterministic
    for a fixed seed.
    """
    cloud = as_cloud(cloud)
    n = cloud.shape[0]
    if n < 4:
        raise ValueError(f"need at least 4 points to split, got {n}")
    ft, fv, fu = fractions
    if min(ft, fv, fu) <= 0 or ft + fv + fu > 1 + 1e-9:
        raise ValueError(f"fractions must be positive and sum to at most 1, got {fractions}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = int(round(n * ft))
    n_val = int(round(n * fv))
    n_test = int(round(n * fu))
    n_train = max(1, min(n_train, n - 2))
    if n_train + n_val + n_test > n:
        n_val = (n - n_train) // 2
        n_test = n - n_train - n_val
    if n_val < 1 or n_test < 1:
        raise ValueError(f"fractions {fractions} leave an empty subset for {n} points")
    train_ids = np.sort(perm[:n_train])
    val_ids = np.sort(perm[n_train : n_train + n_val])
    test_ids = np.sort(perm[n_train + n_val : n_train + n_val + n_test])
    return DataSplit(
        training=cloud[train_ids],
        validation=cloud[val_ids],
        test=cloud[test_ids],
        seed=seed,
        scheme=f"random({ft:g}/{fv:g}/{fu:g})",
    )


def kfold_splits(cloud, k: int, seed: int = 0) -> list[DataSplit]:
    """K rotating (train, holdout) splits; the holdout doubles as test set.

    ``k == len(cloud)`` is leave-one-out.
    """
    cloud = as_cloud(cloud)
    n = cloud.shape[0]
    if not 2 <= k <= n:
        raise ValueError(f"k must be in [2, {n}], got {k}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    folds = np.array_split(perm, k)
    out = []
    for i, holdout in enumerate(folds):
        train_ids = np.sort(np.concatenate([f for j, f in enumerate(folds) if j != i]))
        holdout_ids = np.sort(holdout)
        out.append(
            DataSplit(
                training=cloud[train_ids],
                validation=cloud[holdout_ids],
                test=cloud[holdout_ids],
                seed=seed,
                scheme=f"kfold({k})#{i}",
            )
        )
    return out


@dataclass(frozen=True)
class FitConfig:
    """Everything a fit needs besides the cloud itself.

    ``epsilon=None`` resolves to ``0.01 * var(training z)`` at fit time, a
    scale-aware refinement threshold.
    """

    weight_grid: tuple[WeightSpec, ...] = field(
        default_factory=lambda: knn_parameter_grid(10)
    )
    degrees: tuple[int, int] = (2, 2)
    epsilon: float | None = None
    max_iterations: int = 15
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS
    seed: int = 0

    def __post_init__(self) -> None:
        grid = tuple(self.weight_grid)
        object.__setattr__(self, "weight_grid", grid)
        if len(grid) == 0:
            raise ValueError("weight grid must be nonempty")
        kinds = {spec.kind for spec in grid}
        if len(kinds) != 1:
            raise ValueError(f"weight grid mixes kinds: {sorted(kinds)}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if min(self.degrees) < 0:
            raise ValueError("degrees must be nonnegative")

    @property
    def weight_kind(self) -> str:
        return self.weight_grid[0].kind


def knn_parameter_grid(max_k: int = 10, **common) -> tuple[WeightSpec, ...]:
    """k-nearest-neighbor specs for ``k = 1..max_k`` (ascending)."""
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    return tuple(WeightSpec.knn(k, **common) for k in range(1, max_k + 1))


class TuneResult(NamedTuple):
    spec: WeightSpec
    gmse: float
    surface: WqisaSurface


def tune_parameters(
    training,
    validation,
    space: TensorSplineSpace,
    grid: Sequence[WeightSpec],
) -> TuneResult:
    """Exhaustive search of *grid*: fit on training, score GMSE on validation.

    Ties keep the earliest grid entry, so an ascending grid prefers the
    smallest parameter.  Grid entries that cannot be fitted (zero-weight
    windows, k beyond the training size) are skipped; if every entry fails
    the last failure is re-raised.
    """
    if len(grid) == 0:
        raise ValueError("parameter grid must be nonempty")
    best: TuneResult | None = None
    failure: ZeroWeightError | None = None
    for spec in grid:
        try:
            surface = fit_surface(training, space, spec)
        except ZeroWeightError as exc:
            failure = exc
            continue
        score = surface_gmse(surface, validation)
        if best is None or score < best.gmse:
            best = TuneResult(spec, score, surface)
    if best is None:
        raise ZeroWeightError(f"every grid entry failed; last error: {failure}")
    return best


def refine_mesh(
    space: TensorSplineSpace, error_map: ElementErrorMap, epsilon: float
) -> TensorSplineSpace:
    """Split every element with LMSE above *epsilon* at its midpoints.

    Midpoints are inserted into both knot vectors (deduplicated); the tensor
    structure propagates each cut along the full row and column.  Returns
    the input space unchanged when nothing exceeds the threshold.
    """
    x_edges = space.knots_x.breakpoints
    y_edges = space.knots_y.breakpoints
    if error_map.values.shape != (x_edges.size - 1, y_edges.size - 1):
        raise ValueError("error map is not aligned with the space")
    flagged = np.argwhere(error_map.values > epsilon)
    if flagged.size == 0:
        return space
    new_x = sorted({(x_edges[e] + x_edges[e + 1]) / 2.0 for e in flagged[:, 0]})
    new_y = sorted({(y_edges[f] + y_edges[f + 1]) / 2.0 for f in flagged[:, 1]})
    kx = space.knots_x
    for t in new_x:
        kx = insert_knot(kx, t)
    ky = space.knots_y
    for t in new_y:
        ky = insert_knot(ky, t)
    return TensorSplineSpace(kx, ky)


@dataclass(frozen=True)
class IterationRecord:
    mesh_elements: tuple[int, int]
    parameter: float | int | None
    gmse: float


@dataclass(frozen=True)
class FitReport:
    """Per-iteration history plus the final assessment of one fit."""

    iterations: tuple[IterationRecord, ...]
    stop_reason: str
    best_iteration: int  # 1-based index into `iterations`
    weight_kind: str
    test_mse: float
    seed: int
    wall_time_s: float

    def to_json_dict(self) -> dict:
        """JSON-ready view.  Wall time is omitted: reports with the same
        seed must be byte-identical, and timing is the one field that is
        not a function of the inputs."""
        return {
            "iterations": [
                {
                    "mesh_elements": list(rec.mesh_elements),
                    "parameter": rec.parameter,
                    "gmse": rec.gmse,
                }
                for rec in self.iterations
            ],
            "stop_reason": self.stop_reason,
            "best_iteration": self.best_iteration,
            "weight_kind": self.weight_kind,
            "test_mse": self.test_mse,
            "seed": self.seed,
        }


def fit_split(
    data: DataSplit,
    config: FitConfig,
    domain: tuple[float, float, float, float] | None = None,
) -> tuple[WqisaSurface, FitReport]:
    """Run the tuning/refinement loop on an existing split.

    The spline domain defaults to the joint bounding box of all three
    subsets so that validation and test projections stay evaluable.
    """
    started = time.perf_counter()
    if domain is None:
        boxes = np.asarray(
            [bounding_box(data.training), bounding_box(data.validation), bounding_box(data.test)]
        )
        domain = (
            float(boxes[:, 0].min()),
            float(boxes[:, 1].max()),
            float(boxes[:, 2].min()),
            float(boxes[:, 3].max()),
        )
    epsilon = config.epsilon
    if epsilon is None:
        epsilon = 0.01 * float(np.var(data.training[:, 2]))
    space = TensorSplineSpace.single_element(config.degrees, domain)
    records: list[IterationRecord] = []
    best: TuneResult | None = None
    best_iteration = 0
    stop_reason = "max_iterations"
    for iteration in range(1, config.max_iterations + 1):
        try:
            tuned = tune_parameters(data.training, data.validation, space, config.weight_grid)
        except ZeroWeightError as exc:
            raise ZeroWeightError(f"iteration {iteration}: {exc}") from None
        records.append(
            IterationRecord(
                mesh_elements=space.element_counts,
                parameter=tuned.spec.parameter,
                gmse=tuned.gmse,
            )
        )
        if best is not None and tuned.gmse > best.gmse:
            stop_reason = "gmse_increased"
            break
        previous = best.gmse if best is not None else None
        best = tuned
        best_iteration = iteration
        if previous is not None and previous - tuned.gmse < STAGNATION_TOL:
            stop_reason = "stagnated"
            break
        if iteration == config.max_iterations:
            stop_reason = "max_iterations"
            break
        error_map = lmse(tuned.surface, data.validation, space)
        refined = refine_mesh(space, error_map, epsilon)
        if refined is space:
            stop_reason = "threshold_met"
            break
        space = refined
    assert best is not None
    test_mse = surface_gmse(best.surface, data.test)
    report = FitReport(
        iterations=tuple(records),
        stop_reason=stop_reason,
        best_iteration=best_iteration,
        weight_kind=config.weight_kind,
        test_mse=test_mse,
        seed=data.seed,
        wall_time_s=time.perf_counter() - started,
    )
    return best.surface, report


def fit(cloud, config: FitConfig) -> tuple[WqisaSurface, FitReport]:
    """Split the cloud per the config, then run the full fitting loop."""
    cloud = as_cloud(cloud)
    data = split(cloud, config.fractions, config.seed)
    return fit_split(data, config, domain=bounding_box(cloud))


def cross_validate(cloud, config: FitConfig, k: int) -> ErrorStats:
    """K-fold (or leave-one-out, ``k == len(cloud)``) assessment.

    One fit per fold; holdout residuals are pooled across folds and
    summarized together.
    """
    cloud = as_cloud(cloud)
    domain = bounding_box(cloud)
    pooled: list[np.ndarray] = []
    for fold in kfold_splits(cloud, k, config.seed):
        surface, _ = fit_split(fold, config, domain=domain)
        holdout = fold.test
        pooled.append(holdout[:, 2] - surface.evaluate_many(holdout[:, 0], holdout[:, 1]))
    return ErrorStats.from_residuals(np.concatenate(pooled))
