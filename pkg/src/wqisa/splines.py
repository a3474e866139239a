"""Tensor-product B-spline core: knot vectors, basis evaluation, surfaces.

Conventions used throughout:

* Knot vectors are open ("(p+1)-regular"): boundary knots repeat exactly
  ``degree + 1`` times, interior knots at most ``degree + 1`` times.
* Basis functions are right-continuous; the support of basis ``i`` is the
  half-open window ``[knots[i], knots[i + p + 1])``.  The right end of the
  domain is folded into the last nonempty span so that evaluation is total
  on the closed domain rectangle.
* Knot values are compared exactly.  Knot vectors are constructed, not
  measured, so no tolerance is appropriate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class OutOfDomainError(ValueError):
    """Raised when an evaluation point lies outside the spline domain."""


def _frozen_copy(values) -> np.ndarray:
    """Private read-only float64 copy, so callers cannot mutate us later."""
    array = np.array(values, dtype=float, order="C")
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class KnotVector:
    """An open knot vector: a degree plus a nondecreasing knot sequence.

    For ``len(knots) == n + degree + 1`` the vector spans ``n`` basis
    functions over the domain ``[knots[degree], knots[n]]``.
    """

    degree: int
    knots: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.degree, (int, np.integer)) or self.degree < 0:
            raise ValueError(f"degree must be a nonnegative integer, got {self.degree!r}")
        knots = _frozen_copy(self.knots)
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "knots", knots)
        p = self.degree
        if knots.ndim != 1:
            raise ValueError("knots must be a one-dimensional sequence")
        if not np.isfinite(knots).all():
            raise ValueError("knots must be finite")
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be nondecreasing")
        n = knots.size - p - 1
        if n < p + 1:
            raise ValueError(
                f"need at least {2 * p + 2} knots for degree {p}, got {knots.size}"
            )
        a, b = knots[p], knots[n]
        if a == b:
            raise ValueError("domain is empty: boundary knots coincide")
        if np.count_nonzero(knots == a) != p + 1 or knots[0] != a:
            raise ValueError(f"left boundary knot must occur exactly {p + 1} times")
        if np.count_nonzero(knots == b) != p + 1 or knots[-1] != b:
            raise ValueError(f"right boundary knot must occur exactly {p + 1} times")
        interior = knots[(knots > a) & (knots < b)]
        if interior.size:
            _, counts = np.unique(interior, return_counts=True)
            if counts.max() > p + 1:
                raise ValueError(f"interior knot multiplicity exceeds {p + 1}")

    @property
    def num_basis(self) -> int:
        return self.knots.size - self.degree - 1

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[self.degree]), float(self.knots[self.num_basis])

    @property
    def breakpoints(self) -> np.ndarray:
        """Distinct knot values, i.e. the element edges of the mesh."""
        return np.unique(self.knots)

    @property
    def num_elements(self) -> int:
        return self.breakpoints.size - 1

    @classmethod
    def uniform_open(
        cls, degree: int, num_elements: int, lo: float = 0.0, hi: float = 1.0
    ) -> "KnotVector":
        """Open knot vector with *num_elements* equal spans on ``[lo, hi]``."""
        if num_elements < 1:
            raise ValueError("num_elements must be >= 1")
        if not lo < hi:
            raise ValueError("lo must be < hi")
        interior = np.linspace(lo, hi, num_elements + 1)[1:-1]
        knots = np.concatenate([np.full(degree + 1, lo), interior, np.full(degree + 1, hi)])
        return cls(degree, knots)

    @classmethod
    def piecewise_bezier(cls, degree: int, breakpoints) -> "KnotVector":
        """Knot vector with every knot at maximum multiplicity ``degree + 1``."""
        bp = np.asarray(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing with >= 2 values")
        return cls(degree, np.repeat(bp, degree + 1))

    def __repr__(self) -> str:
        a, b = self.domain
        return (
            f"KnotVector(degree={self.degree}, n={self.num_basis}, "
            f"domain=[{a:g}, {b:g}], elements={self.num_elements})"
        )


def find_span(kv: KnotVector, t: float) -> int:
    """Index ``mu`` of the nonempty knot span with ``knots[mu] <= t < knots[mu+1]``.

    The right end of the domain is mapped to the last nonempty span, so the
    result is defined for every ``t`` in the closed domain.
    """
    a, b = kv.domain
    if not (a <= t <= b):
        raise OutOfDomainError(f"t={t!r} outside the domain [{a}, {b}]")
    if t == b:
        return kv.num_basis - 1
    return int(np.searchsorted(kv.knots, t, side="right") - 1)


def basis_rows(kv: KnotVector, ts) -> tuple[np.ndarray, np.ndarray]:
    """All nonzero basis values at each point of *ts*.

    Returns ``(spans, values)`` where ``values[m, r]`` is the value of basis
    ``spans[m] - degree + r`` at ``ts[m]``.  Uses the standard triangular
    recurrence, so each row is nonnegative and sums to one up to rounding.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    a, b = kv.domain
    bad = ~((ts >= a) & (ts <= b))
    if bad.any():
        raise OutOfDomainError(
            f"point {float(ts[bad][0])!r} outside the domain [{a}, {b}]"
        )
    p = kv.degree
    n = kv.num_basis
    spans = np.minimum(np.searchsorted(kv.knots, ts, side="right") - 1, n - 1)
    m = ts.shape[0]
    values = np.ones((m, 1))
    if p == 0:
        return spans, values
    left = np.empty((m, p + 1))
    right = np.empty((m, p + 1))
    for j in range(1, p + 1):
        left[:, j] = ts - kv.knots[spans + 1 - j]
        right[:, j] = kv.knots[spans + j] - ts
        nxt = np.empty((m, j + 1))
        saved = np.zeros(m)
        for r in range(j):
            temp = values[:, r] / (right[:, r + 1] + left[:, j - r])
            nxt[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        nxt[:, j] = saved
        values = nxt
    return spans, values


def basis_value(kv: KnotVector, i: int, t: float) -> float:
    """Value of basis function *i* at *t*.

    Zero outside the local support window; points beyond the domain are
    outside every support and also evaluate to zero.
    """
    n = kv.num_basis
    if not 0 <= i < n:
        raise IndexError(f"basis index {i} out of range [0, {n})")
    a, b = kv.domain
    if not (a <= t <= b):
        return 0.0
    spans, values = basis_rows(kv, [t])
    offset = i - (int(spans[0]) - kv.degree)
    if 0 <= offset <= kv.degree:
        return float(values[0, offset])
    return 0.0


def local_basis_value(local_knots, t: float) -> float:
    """Evaluate the single B-spline determined by its local knot vector.

    *local_knots* holds ``degree + 2`` nondecreasing values.  This is the
    plain two-term recursion with the 0/0 := 0 convention and half-open
    support, kept independent of the span-based evaluation so either can
    check the other.
    """
    lk = np.asarray(local_knots, dtype=float)
    if lk.ndim != 1 or lk.size < 2:
        raise ValueError("local knot vector needs at least two values")
    if np.any(np.diff(lk) < 0):
        raise ValueError("local knots must be nondecreasing")
    p = lk.size - 2
    if p == 0:
        return 1.0 if lk[0] <= t < lk[1] else 0.0
    value = 0.0
    denom = lk[p] - lk[0]
    if denom > 0.0:
        value += (t - lk[0]) / denom * local_basis_value(lk[:-1], t)
    denom = lk[p + 1] - lk[1]
    if denom > 0.0:
        value += (lk[p + 1] - t) / denom * local_basis_value(lk[1:], t)
    return value


def knot_averages(kv: KnotVector) -> np.ndarray:
    """Greville abscissae: the mean of ``degree`` consecutive interior knots.

    For degree zero (no interior knots to average) the midpoints of the
    spans are returned instead.  The result is nondecreasing and spans the
    closed domain.
    """
    p = kv.degree
    knots = kv.knots
    if p == 0:
        return (knots[:-1] + knots[1:]) / 2.0
    n = kv.num_basis
    windows = np.lib.stride_tricks.sliding_window_view(knots, p)
    return windows[1 : n + 1].mean(axis=1)


def insert_knot(kv: KnotVector, t: float) -> KnotVector:
    """New knot vector with *t* inserted, preserving order and regularity."""
    a, b = kv.domain
    if not (a < t < b):
        raise ValueError(f"insertion point {t!r} outside the open domain ({a}, {b})")
    if np.count_nonzero(kv.knots == t) >= kv.degree + 1:
        raise ValueError(f"inserting {t!r} would exceed multiplicity {kv.degree + 1}")
    pos = int(np.searchsorted(kv.knots, t, side="right"))
    return KnotVector(kv.degree, np.insert(kv.knots, pos, t))


@dataclass(frozen=True, eq=False)
class TensorSplineSpace:
    """Tensor product of two knot vectors; dimension ``n_x * n_y``."""

    knots_x: KnotVector
    knots_y: KnotVector

    @property
    def shape(self) -> tuple[int, int]:
        return self.knots_x.num_basis, self.knots_y.num_basis

    @property
    def dimension(self) -> int:
        nx, ny = self.shape
        return nx * ny

    @property
    def degrees(self) -> tuple[int, int]:
        return self.knots_x.degree, self.knots_y.degree

    @property
    def domain(self) -> tuple[float, float, float, float]:
        (a1, b1), (a2, b2) = self.knots_x.domain, self.knots_y.domain
        return a1, b1, a2, b2

    @property
    def element_counts(self) -> tuple[int, int]:
        return self.knots_x.num_elements, self.knots_y.num_elements

    @classmethod
    def single_element(
        cls, degrees: tuple[int, int], bbox: tuple[float, float, float, float]
    ) -> "TensorSplineSpace":
        """One-element mesh with maximum boundary multiplicities over *bbox*."""
        xmin, xmax, ymin, ymax = bbox
        return cls(
            KnotVector.piecewise_bezier(degrees[0], [xmin, xmax]),
            KnotVector.piecewise_bezier(degrees[1], [ymin, ymax]),
        )

    def __repr__(self) -> str:
        ex, ey = self.element_counts
        return (
            f"TensorSplineSpace(degrees={self.degrees}, shape={self.shape}, "
            f"elements={ex}x{ey})"
        )


def element_of(space: TensorSplineSpace, x: float, y: float) -> tuple[int, int]:
    """Knot-span index pair ``(mu, nu)`` of the element containing ``(x, y)``."""
    try:
        mu = find_span(space.knots_x, x)
    except OutOfDomainError as exc:
        raise OutOfDomainError(f"x coordinate: {exc}") from None
    try:
        nu = find_span(space.knots_y, y)
    except OutOfDomainError as exc:
        raise OutOfDomainError(f"y coordinate: {exc}") from None
    return mu, nu


@dataclass(frozen=True, eq=False)
class WqisaSurface:
    """A tensor-product spline surface in B-form.

    ``coefficients[i, j]`` multiplies the basis product ``B_i(x) * B_j(y)``.
    Evaluation is clamped onto the closed range of the active coefficients:
    the value is a convex combination of them, so the clamp only strips
    floating-point spill and makes the convex-hull bound hold exactly.
    """

    space: TensorSplineSpace
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        coeffs = _frozen_copy(self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if coeffs.shape != self.space.shape:
            raise ValueError(
                f"coefficient grid {coeffs.shape} does not match space {self.space.shape}"
            )
        if not np.isfinite(coeffs).all():
            raise ValueError("coefficients must be finite")

    def evaluate(self, x: float, y: float) -> float:
        return float(self.evaluate_many([x], [y])[0])

    def evaluate_many(self, xs, ys) -> np.ndarray:
        return evaluate_surface_many(self, xs, ys)

    def __repr__(self) -> str:
        return f"WqisaSurface(space={self.space!r})"


def evaluate_surface_many(surface: WqisaSurface, xs, ys) -> np.ndarray:
    """Evaluate the surface at paired coordinate arrays ``xs``, ``ys``."""
    space = surface.space
    px, py = space.degrees
    spans_x, bx = basis_rows(space.knots_x, xs)
    spans_y, by = basis_rows(space.knots_y, ys)
    ix = spans_x[:, None] - px + np.arange(px + 1)[None, :]
    iy = spans_y[:, None] - py + np.arange(py + 1)[None, :]
    active = surface.coefficients[ix[:, :, None], iy[:, None, :]]
    values = np.einsum("mab,ma,mb->m", active, bx, by)
    lo = active.min(axis=(1, 2))
    hi = active.max(axis=(1, 2))
    return np.clip(values, lo, hi)


def evaluate_surface(surface: WqisaSurface, x: float, y: float) -> float:
    """Surface value at a single point; raises ``OutOfDomainError`` outside."""
    return surface.evaluate(x, y)


def insert_knot_surface(surface: WqisaSurface, axis: str, t: float) -> WqisaSurface:
    """Insert a knot along ``axis`` ("x" or "y"), re-deriving coefficients.

    The standard single-knot insertion formula is applied, so the new
    surface is pointwise identical to the input.
    """
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    transpose = axis == "y"
    kv = surface.space.knots_y if transpose else surface.space.knots_x
    coeffs = surface.coefficients.T if transpose else surface.coefficients
    p = kv.degree
    mu = find_span(kv, t)
    new_kv = insert_knot(kv, t)
    n = kv.num_basis
    out = np.empty((n + 1, coeffs.shape[1]))
    out[: mu - p + 1] = coeffs[: mu - p + 1]
    for i in range(mu - p + 1, mu + 1):
        alpha = (t - kv.knots[i]) / (kv.knots[i + p] - kv.knots[i])
        out[i] = alpha * coeffs[i] + (1.0 - alpha) * coeffs[i - 1]
    out[mu + 1 :] = coeffs[mu:]
    if transpose:
        space = TensorSplineSpace(surface.space.knots_x, new_kv)
        return WqisaSurface(space, out.T)
    space = TensorSplineSpace(new_kv, surface.space.knots_y)
    return WqisaSurface(space, out)
