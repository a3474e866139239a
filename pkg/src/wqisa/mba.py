"""Multilevel B-spline approximation baseline.

Level 0 fits the cloud on a one-element mesh; every further level halves the
elements in both directions and fits the residuals left by the accumulated
surface.  Level coefficients come from the explicit local least-squares
formula: for each data point the minimum-norm coefficients reproducing it
are computed, then blended per basis function with its squared basis values
as blending weights.  No linear system is solved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clouds import as_cloud, bounding_box
from .splines import KnotVector, TensorSplineSpace, WqisaSurface, basis_rows


@dataclass(frozen=True, eq=False)
class MbaSurface:
    """A stack of per-level surfaces over a common domain; evaluation sums them."""

    levels: tuple[WqisaSurface, ...]

    def __post_init__(self) -> None:
        if len(self.levels) < 1:
            raise ValueError("an MBA surface needs at least one level")

    @property
    def domain(self) -> tuple[float, float, float, float]:
        return self.levels[0].space.domain

    def evaluate(self, x: float, y: float) -> float:
        return float(self.evaluate_many([x], [y])[0])

    def evaluate_many(self, xs, ys) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        total = np.zeros(xs.shape[0])
        for level in self.levels:
            total += level.evaluate_many(xs, ys)
        return total


def dyadic_space(
    degrees: tuple[int, int],
    bbox: tuple[float, float, float, float],
    level: int,
) -> TensorSplineSpace:
    """Uniform tensor mesh with ``2**level`` elements per direction."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    xmin, xmax, ymin, ymax = bbox
    elems = 2**level
    return TensorSplineSpace(
        KnotVector.uniform_open(degrees[0], elems, xmin, xmax),
        KnotVector.uniform_open(degrees[1], elems, ymin, ymax),
    )


def mba_level_coefficients(cloud, space: TensorSplineSpace) -> np.ndarray:
    """Explicit per-level coefficients for the residual cloud on *space*.

    A basis function with no data point in its support gets coefficient 0,
    which keeps the operation total.
    """
    cloud = as_cloud(cloud)
    z = cloud[:, 2]
    px, py = space.degrees
    nx, ny = space.shape
    spans_x, bx = basis_rows(space.knots_x, cloud[:, 0])
    spans_y, by = basis_rows(space.knots_y, cloud[:, 1])
    # sum of squared active basis values factorizes over the tensor product
    ssq = (bx**2).sum(axis=1) * (by**2).sum(axis=1)
    numerator = np.zeros(nx * ny)
    denominator = np.zeros(nx * ny)
    for a in range(px + 1):
        gi = spans_x - px + a
        for b in range(py + 1):
            gj = spans_y - py + b
            w = bx[:, a] * by[:, b]
            flat = gi * ny + gj
            np.add.at(numerator, flat, w**3 * z / ssq)
            np.add.at(denominator, flat, w**2)
    grid = np.zeros(nx * ny)
    touched = denominator > 0.0
    grid[touched] = numerator[touched] / denominator[touched]
    return grid.reshape(nx, ny)


def fit_mba(
    cloud,
    max_levels: int,
    validation,
    degrees: tuple[int, int] = (2, 2),
    domain: tuple[float, float, float, float] | None = None,
) -> tuple[MbaSurface, list[float]]:
    """Fit levels until validation GMSE rises or *max_levels* is reached.

    Returns the surface truncated at the best level together with the full
    per-level GMSE history (including the increase that stopped the fit,
    when one occurred).  The default domain is the joint bounding box of
    the training and validation clouds so both stay evaluable.
    """
    if max_levels < 1:
        raise ValueError("max_levels must be >= 1")
    cloud = as_cloud(cloud)
    validation = as_cloud(validation)
    if domain is None:
        boxes = np.asarray([bounding_box(cloud), bounding_box(validation)])
        domain = (
            float(boxes[:, 0].min()),
            float(boxes[:, 1].max()),
            float(boxes[:, 2].min()),
            float(boxes[:, 3].max()),
        )
    residual = cloud[:, 2].copy()
    val_pred = np.zeros(validation.shape[0])
    levels: list[WqisaSurface] = []
    gmse_history: list[float] = []
    for level in range(max_levels):
        space = dyadic_space(degrees, domain, level)
        grid = mba_level_coefficients(
            np.column_stack([cloud[:, 0], cloud[:, 1], residual]), space
        )
        surface = WqisaSurface(space, grid)
        candidate_val = val_pred + surface.evaluate_many(validation[:, 0], validation[:, 1])
        gmse = float(np.mean((validation[:, 2] - candidate_val) ** 2))
        gmse_history.append(gmse)
        if level > 0 and gmse > gmse_history[level - 1]:
            break
        levels.append(surface)
        val_pred = candidate_val
        residual = residual - surface.evaluate_many(cloud[:, 0], cloud[:, 1])
    return MbaSurface(tuple(levels)), gmse_history
