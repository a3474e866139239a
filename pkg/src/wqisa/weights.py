"""Weight functions and the weighted control-point estimator.

Every coefficient of a fitted surface is the weighted mean of cloud heights,
with weights centered at a parametric location ``(u, v)``:

    estimate = sum(z * w(x, y, u, v)) / sum(w(x, y, u, v))

Available window kinds: indicator (closed ball of radius ``r``), Gaussian
(``exp(-d / (2 sigma^2))``, with a squared-distance variant behind a switch),
k-nearest-neighbor (uniform ``1/k`` on the k closest planar projections),
inverse-distance, and inverse-distance truncated to the K closest points.

The estimate is a convex combination of the contributing heights, so it is
clamped onto their closed range; the clamp only removes floating-point spill.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .clouds import as_cloud, bbox_diagonal
from .kdtree import PlanarIndex
from .splines import TensorSplineSpace, WqisaSurface, knot_averages

# a k-d tree pays off only when many estimates reuse it on a big cloud;
# below this size a vectorized scan is both faster and equally exact
LARGE_CLOUD = 4096

WEIGHT_KINDS = ("indicator", "gaussian", "knn", "idw", "idw_truncated")

# default coincidence tolerance: this fraction of the bounding-box diagonal
COINCIDENCE_SCALE = 1e-12


class ZeroWeightError(ValueError):
    """Total weight vanished; the window is too narrow for the data."""


@dataclass(frozen=True)
class WeightSpec:
    """A weight-function choice plus exactly the parameters it needs.

    ``outlier_filter`` drops contributing points whose height falls outside
    the Tukey fences ``[Q1 - fence*IQR, Q3 + fence*IQR]`` of the positively
    weighted subset before the quotient is formed.
    """

    kind: str
    radius: float | None = None
    sigma: float | None = None
    k: int | None = None
    truncation: int | None = None
    coincidence_tol: float | None = None
    gaussian_squared: bool = False
    outlier_filter: bool = False
    fence: float = 1.5

    def __post_init__(self) -> None:
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {WEIGHT_KINDS}")
        required = {
            "indicator": ("radius",),
            "gaussian": ("sigma",),
            "knn": ("k",),
            "idw": (),
            "idw_truncated": ("truncation",),
        }[self.kind]
        allowed = set(required)
        if self.kind in ("idw", "idw_truncated"):
            allowed.add("coincidence_tol")
        if self.kind == "gaussian":
            allowed.add("gaussian_squared")
        for name in ("radius", "sigma", "k", "truncation", "coincidence_tol"):
            value = getattr(self, name)
            if name in required and value is None:
                raise ValueError(f"weight kind {self.kind!r} requires parameter {name!r}")
            if value is not None and name not in allowed:
                raise ValueError(f"parameter {name!r} does not apply to kind {self.kind!r}")
        if self.radius is not None and not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError("truncation must be a positive integer")
        if self.coincidence_tol is not None and self.coincidence_tol < 0:
            raise ValueError("coincidence tolerance must be nonnegative")
        if self.fence < 0:
            raise ValueError("fence multiplier must be nonnegative")

    @property
    def parameter(self) -> float | int | None:
        """The kind's tunable scalar, used for reports and grid labels."""
        return {
            "indicator": self.radius,
            "gaussian": self.sigma,
            "knn": self.k,
            "idw": None,
            "idw_truncated": self.truncation,
        }[self.kind]

    @classmethod
    def indicator(cls, radius: float, **common) -> "WeightSpec":
        return cls(kind="indicator", radius=radius, **common)

    @classmethod
    def gaussian(cls, sigma: float, squared: bool = False, **common) -> "WeightSpec":
        return cls(kind="gaussian", sigma=sigma, gaussian_squared=squared, **common)

    @classmethod
    def knn(cls, k: int, **common) -> "WeightSpec":
        return cls(kind="knn", k=k, **common)

    @classmethod
    def idw(cls, coincidence_tol: float | None = None, **common) -> "WeightSpec":
        return cls(kind="idw", coincidence_tol=coincidence_tol, **common)

    @classmethod
    def truncated_idw(
        cls, truncation: int, coincidence_tol: float | None = None, **common
    ) -> "WeightSpec":
        return cls(kind="idw_truncated", truncation=truncation, coincidence_tol=coincidence_tol, **common)


def weight_indicator(x: float, y: float, u: float, v: float, r: float) -> float:
    """1 inside the closed ball of radius *r* around ``(u, v)``, else 0."""
    if not r > 0:
        raise ValueError("radius must be positive")
    dx = x - u
    dy = y - v
    return 1.0 if dx * dx + dy * dy <= r * r else 0.0


def weight_gaussian(
    x: float, y: float, u: float, v: float, sigma: float, squared: bool = False
) -> float:
    """Gaussian window ``exp(-d / (2 sigma^2))`` on the planar distance *d*.

    ``squared=True`` switches the exponent to the squared distance, the
    conventional bell shape.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    dx = x - u
    dy = y - v
    d2 = dx * dx + dy * dy
    exponent = d2 if squared else np.sqrt(d2)
    return float(np.exp(-exponent / (2.0 * sigma * sigma)))


def weight_knn(query, cloud, k: int) -> np.ndarray:
    """Per-point weights: ``1/k`` on the k nearest planar projections, else 0.

    Distance ties at the k-th place are broken by input order, so results
    are reproducible.  Weights sum to one.
    """
    cloud = as_cloud(cloud)
    n = cloud.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    ids = _nearest_ids(cloud, float(query[0]), float(query[1]), k)
    weights = np.zeros(n)
    weights[ids] = 1.0 / k
    return weights


def weight_idw(x: float, y: float, u: float, v: float, cloud, tol: float) -> float:
    """Inverse-distance weight with the coincidence case split.

    If no cloud projection lies within *tol* of ``(u, v)`` the weight is the
    reciprocal distance from ``(x, y)`` to ``(u, v)``.  Otherwise the
    coincident points share uniform weight ``1/|C|`` and all others get 0.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    cloud = as_cloud(cloud)
    du = cloud[:, 0] - u
    dv = cloud[:, 1] - v
    coincident = du * du + dv * dv <= tol * tol
    count = int(np.count_nonzero(coincident))
    dx = x - u
    dy = y - v
    d2 = dx * dx + dy * dy
    if count == 0:
        return float(1.0 / np.sqrt(d2))
    return 1.0 / count if d2 <= tol * tol else 0.0


def _nearest_ids(cloud: np.ndarray, u: float, v: float, k: int, index: PlanarIndex | None = None) -> np.ndarray:
    """Exact k-nearest planar projections, ties broken by lower id."""
    if index is not None:
        return index.knn((u, v), k)
    d2 = (cloud[:, 0] - u) ** 2 + (cloud[:, 1] - v) ** 2
    order = np.lexsort((np.arange(d2.size), d2))
    return order[:k]


def _coincidence_tol(spec: WeightSpec, cloud: np.ndarray) -> float:
    if spec.coincidence_tol is not None:
        return spec.coincidence_tol
    return COINCIDENCE_SCALE * bbox_diagonal(cloud)


def _positive_weights(
    cloud: np.ndarray,
    u: float,
    v: float,
    spec: WeightSpec,
    index: PlanarIndex | None,
) -> tuple[np.ndarray, np.ndarray]:
    """Ids with strictly positive weight and those weights."""
    x = cloud[:, 0]
    y = cloud[:, 1]
    if spec.kind == "indicator":
        r = spec.radius
        if index is not None:
            ids = index.within_radius((u, v), r)
        else:
            d2 = (x - u) ** 2 + (y - v) ** 2
            ids = np.flatnonzero(d2 <= r * r)
        return ids, np.ones(ids.size)
    if spec.kind == "gaussian":
        d2 = (x - u) ** 2 + (y - v) ** 2
        exponent = d2 if spec.gaussian_squared else np.sqrt(d2)
        w = np.exp(-exponent / (2.0 * spec.sigma * spec.sigma))
        ids = np.flatnonzero(w > 0.0)
        return ids, w[ids]
    if spec.kind == "knn":
        k = spec.k
        if k > cloud.shape[0]:
            raise ZeroWeightError(f"k={k} exceeds cloud size {cloud.shape[0]}")
        ids = _nearest_ids(cloud, u, v, k, index)
        return ids, np.full(ids.size, 1.0 / k)
    # the two inverse-distance kinds share the coincidence case split
    tol = _coincidence_tol(spec, cloud)
    if spec.kind == "idw_truncated":
        kk = min(spec.truncation, cloud.shape[0])
        ids = _nearest_ids(cloud, u, v, kk, index)
    else:
        ids = np.arange(cloud.shape[0])
    d2 = (x[ids] - u) ** 2 + (y[ids] - v) ** 2
    coincident = d2 <= tol * tol
    if coincident.any():
        ids = ids[coincident]
        return ids, np.full(ids.size, 1.0 / ids.size)
    return ids, 1.0 / np.sqrt(d2)


def estimate_control_point(
    cloud,
    u: float,
    v: float,
    spec: WeightSpec,
    index: PlanarIndex | None = None,
) -> float:
    """Weighted mean of cloud heights with the window centered at ``(u, v)``.

    With ``spec.outlier_filter`` the positively weighted points are first
    screened through Tukey fences on their heights (quartiles by linear
    interpolation of order statistics); if the fences reject everything the
    unfiltered quotient is used and a ``RuntimeWarning`` flags the event.

    Raises ``ZeroWeightError`` when no point receives positive weight, so
    the caller can widen the window instead of silently producing zeros.
    """
    cloud = as_cloud(cloud)
    ids, w = _positive_weights(cloud, float(u), float(v), spec, index)
    if ids.size == 0:
        raise ZeroWeightError(f"no point has positive weight at (u, v)=({u}, {v})")
    # canonical ascending-id order makes the accumulation reproducible
    order = np.argsort(ids)
    ids = ids[order]
    w = w[order]
    z = cloud[ids, 2]
    if spec.outlier_filter and z.size > 1:
        q1, q3 = np.percentile(z, (25.0, 75.0))
        iqr = q3 - q1
        keep = (z >= q1 - spec.fence * iqr) & (z <= q3 + spec.fence * iqr)
        if not keep.any():
            warnings.warn(
                "outlier filter rejected every contributing point; "
                "falling back to the unfiltered estimate",
                RuntimeWarning,
                stacklevel=2,
            )
        else:
            z = z[keep]
            w = w[keep]
    total = float(np.sum(w))
    if not total > 0.0:
        raise ZeroWeightError(f"total weight underflowed to zero at (u, v)=({u}, {v})")
    estimate = float(np.dot(z, w)) / total
    return float(min(max(estimate, z.min()), z.max()))


def estimate_all_coefficients(cloud, space: TensorSplineSpace, spec: WeightSpec) -> np.ndarray:
    """Estimate the full coefficient grid at every pair of knot averages.

    Entries are independent; a k-d tree over the cloud is built once and
    reused when the cloud is large and the window kind queries neighborhoods.
    Zero-weight failures are re-raised with the offending grid entry.
    """
    cloud = as_cloud(cloud)
    index = None
    if cloud.shape[0] >= LARGE_CLOUD and spec.kind in ("indicator", "knn", "idw_truncated"):
        index = PlanarIndex(cloud[:, :2])
    us = knot_averages(space.knots_x)
    vs = knot_averages(space.knots_y)
    grid = np.empty((us.size, vs.size))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            try:
                grid[i, j] = estimate_control_point(cloud, u, v, spec, index)
            except ZeroWeightError as exc:
                raise ZeroWeightError(f"coefficient (i={i}, j={j}): {exc}") from None
    return grid


def fit_surface(cloud, space: TensorSplineSpace, spec: WeightSpec) -> WqisaSurface:
    """Convenience wrapper: estimate all coefficients and wrap them."""
    return WqisaSurface(space, estimate_all_coefficients(cloud, space, spec))
