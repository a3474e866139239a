"""Independent brute-force reference implementations used by the tests.

Everything here recomputes results from the defining formulas with plain
full scans and sorts, deliberately avoiding the library's spatial index and
span-based evaluation paths.
"""

from __future__ import annotations

import numpy as np


def naive_basis(local_knots, t: float) -> float:
    """Two-term recursion straight from the definition, 0/0 treated as 0."""
    lk = [float(v) for v in local_knots]
    p = len(lk) - 2
    if p == 0:
        return 1.0 if lk[0] <= t < lk[1] else 0.0
    total = 0.0
    if lk[p] > lk[0]:
        total += (t - lk[0]) / (lk[p] - lk[0]) * naive_basis(lk[:-1], t)
    if lk[p + 1] > lk[1]:
        total += (lk[p + 1] - t) / (lk[p + 1] - lk[1]) * naive_basis(lk[1:], t)
    return total


def brute_knn_ids(points: np.ndarray, u: float, v: float, k: int) -> np.ndarray:
    """Full sort on (squared distance, id)."""
    d2 = (points[:, 0] - u) ** 2 + (points[:, 1] - v) ** 2
    order = np.lexsort((np.arange(d2.size), d2))
    return order[:k]


def brute_radius_ids(points: np.ndarray, u: float, v: float, r: float) -> np.ndarray:
    d2 = (points[:, 0] - u) ** 2 + (points[:, 1] - v) ** 2
    return np.flatnonzero(d2 <= r * r)


def brute_estimate(cloud: np.ndarray, u: float, v: float, spec) -> float:
    """Control-point estimate recomputed from the weight definitions.

    Returns the same clamped weighted mean the library promises; raises
    ``ValueError`` when no weight is positive so callers can assert the
    failure mode agrees too.
    """
    x, y, z = cloud[:, 0], cloud[:, 1], cloud[:, 2]
    d2 = (x - u) ** 2 + (y - v) ** 2
    n = cloud.shape[0]
    if spec.kind == "indicator":
        w = (d2 <= spec.radius * spec.radius).astype(float)
    elif spec.kind == "gaussian":
        exponent = d2 if spec.gaussian_squared else np.sqrt(d2)
        w = np.exp(-exponent / (2.0 * spec.sigma * spec.sigma))
    elif spec.kind == "knn":
        if spec.k > n:
            raise ValueError("k exceeds cloud size")
        sel = brute_knn_ids(cloud, u, v, spec.k)
        w = np.zeros(n)
        w[sel] = 1.0 / spec.k
    elif spec.kind in ("idw", "idw_truncated"):
        tol = spec.coincidence_tol
        if tol is None:
            dx = cloud[:, 0].max() - cloud[:, 0].min()
            dy = cloud[:, 1].max() - cloud[:, 1].min()
            tol = 1e-12 * np.hypot(dx, dy)
        if spec.kind == "idw_truncated":
            sel = brute_knn_ids(cloud, u, v, min(spec.truncation, n))
        else:
            sel = np.arange(n)
        w = np.zeros(n)
        coincident = sel[d2[sel] <= tol * tol]
        if coincident.size:
            w[coincident] = 1.0 / coincident.size
        else:
            w[sel] = 1.0 / np.sqrt(d2[sel])
    else:
        raise AssertionError(f"unhandled kind {spec.kind}")
    positive = w > 0.0
    if not positive.any():
        raise ValueError("zero total weight")
    zs = z[positive]
    ws = w[positive]
    if spec.outlier_filter and zs.size > 1:
        q1, q3 = np.percentile(zs, (25.0, 75.0))
        iqr = q3 - q1
        keep = (zs >= q1 - spec.fence * iqr) & (zs <= q3 + spec.fence * iqr)
        if keep.any():
            zs = zs[keep]
            ws = ws[keep]
    value = float(np.dot(zs, ws)) / float(np.sum(ws))
    return float(min(max(value, zs.min()), zs.max()))


def brute_directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    worst = 0.0
    for row in a:
        nearest = np.sqrt(((b - row) ** 2).sum(axis=1)).min()
        worst = max(worst, float(nearest))
    return worst


def brute_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    return max(brute_directed_hausdorff(a, b), brute_directed_hausdorff(b, a))


def random_cloud(rng: np.random.Generator, n: int, scale: float = 1.0, dupes: bool = False) -> np.ndarray:
    """Random cloud on a random box; optionally duplicate a few rows."""
    origin = rng.uniform(-5, 5, size=2)
    widths = rng.uniform(0.5, 2.0, size=2) * scale
    xy = origin + rng.uniform(0.0, 1.0, size=(n, 2)) * widths
    z = rng.uniform(-3.0, 3.0, size=n)
    cloud = np.column_stack([xy, z])
    if dupes and n >= 4:
        take = rng.integers(1, max(2, n // 8), endpoint=True)
        src = rng.choice(n, size=take)
        dst = rng.choice(n, size=take)
        cloud[dst] = cloud[src]
    return cloud
