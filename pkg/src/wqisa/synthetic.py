"""Synthetic clouds for tests and benchmarks: a hemisphere cap plus noise."""

from __future__ import annotations

import numpy as np

from .clouds import as_cloud


def hemisphere_height(x, y):
    """Height of the benchmark cap: ``sqrt(64 - 81 r^2) / 8.5`` with ``r``
    the distance from ``(0.5, 0.5)``.  The radicand is positive on the whole
    unit square."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    radicand = 64.0 - 81.0 * ((x - 0.5) ** 2 + (y - 0.5) ** 2)
    return np.sqrt(radicand) / 8.5


def hemisphere_cloud(n: int, seed: int = 0) -> np.ndarray:
    """*n* exact samples of the hemisphere cap, planar positions uniform on
    the unit square (which lies inside the cap's support disc)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    pts = np.empty((n, 3))
    filled = 0
    while filled < n:
        xy = rng.uniform(0.0, 1.0, size=(n - filled, 2))
        radicand = 64.0 - 81.0 * ((xy[:, 0] - 0.5) ** 2 + (xy[:, 1] - 0.5) ** 2)
        good = xy[radicand >= 0.0]
        take = good.shape[0]
        pts[filled : filled + take, :2] = good
        filled += take
    pts[:, 2] = hemisphere_height(pts[:, 0], pts[:, 1])
    return pts


def perturb(
    cloud,
    noise_std: float = 0.0,
    outlier_fraction: float = 0.0,
    outlier_scale: float = 1.0,
    seed: int = 0,
) -> np.ndarray:
    """Add Gaussian z-noise, then replace a fraction of heights with outliers.

    Outliers are uniform draws centered on the original data range, with
    half-width ``outlier_scale`` times half the range.  Positions are left
    untouched; the result is a new cloud, deterministic per seed.
    """
    cloud = as_cloud(cloud)
    if not 0.0 <= outlier_fraction <= 1.0:
        raise ValueError("outlier_fraction must be in [0, 1]")
    if noise_std < 0 or outlier_scale < 0:
        raise ValueError("noise_std and outlier_scale must be nonnegative")
    rng = np.random.default_rng(seed)
    out = cloud.copy()
    z = out[:, 2]
    zmin, zmax = float(z.min()), float(z.max())
    if noise_std > 0:
        z += rng.normal(0.0, noise_std, size=z.size)
    n_out = int(round(outlier_fraction * z.size))
    if n_out > 0:
        chosen = rng.choice(z.size, size=n_out, replace=False)
        center = 0.5 * (zmin + zmax)
        half_width = 0.5 * outlier_scale * (zmax - zmin)
        z[chosen] = rng.uniform(center - half_width, center + half_width, size=n_out)
    return out
