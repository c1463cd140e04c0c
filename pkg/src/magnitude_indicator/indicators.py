"""Hypervolume and magnitude of anchored dominated sets.

Magnitude of ``D(A) = union of [0, a]`` in the l1 box setting is

    Mag(D) = sum over S subset of coordinates of 2**-|S| * HV_|S|(D(pi_S A))

with the empty subset contributing 1 for a nonempty set. Hypervolume is the
top term. Three independent routes are provided:

* sweeps (d <= 3) combined through coordinate projections,
* inclusion-exclusion over all subsets of points (any d, small n),
* closed forms (single boxes and zero-anchored planar unions).

An empty approximation set has hypervolume 0 and magnitude 0.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike
from scipy.spatial.distance import cdist

from .errors import (
    AnchorAbovePoint,
    DimensionMismatch,
    NegativeLength,
    SingularSimilarityMatrix,
    TooManyPoints,
)
from .geometry import as_points, coordinate_subsets, nondominated_filter

Method = Literal["sweep", "inclusion_exclusion", "projection", "closed_form"]

MAX_INCL_EXCL_POINTS = 25
MAX_FINITE_SPACE_POINTS = 2000
# points per low block of the subset enumeration; 2**16 rows per block
_LOW_BITS = 16


@dataclass(frozen=True)
class IndicatorValue:
    value: float
    method: Method
    dimension: int

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class ShadowDecomposition:
    """Total projected measures ``V_k`` for k = 0..d.

    ``terms[k]`` is the sum over all size-k coordinate subsets of the
    k-dimensional measure of the projected dominated set.
    """

    terms: tuple[float, ...]

    @property
    def magnitude(self) -> float:
        return float(sum(v / 2.0**k for k, v in enumerate(self.terms)))

    @property
    def hypervolume(self) -> float:
        return self.terms[-1]

    def to_dict(self) -> dict:
        return {
            "V": list(self.terms),
            "magnitude": self.magnitude,
            "hypervolume": self.hypervolume,
        }


def _anchored(points: ArrayLike, dim: int | None = None) -> np.ndarray:
    pts = as_points(points, dim)
    if pts.size and np.any(pts < 0):
        raise AnchorAbovePoint("indicator input must be anchored (all coordinates >= 0)")
    return pts


# ---------------------------------------------------------------------------
# sweeps


def _hv1(pts: np.ndarray) -> float:
    return float(pts[:, 0].max()) if pts.shape[0] else 0.0


def _hv2(pts: np.ndarray) -> float:
    if pts.shape[0] == 0:
        return 0.0
    # x descending, y descending on ties
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    x = pts[order, 0]
    levels = np.maximum.accumulate(np.concatenate(([0.0], pts[order, 1])))
    return float(np.dot(x, np.diff(levels)))


class _Staircase:
    """Nondominated 2D front with its dominated area, updated by insertion.

    ``xs`` ascends strictly and ``ys`` descends strictly.
    """

    def __init__(self) -> None:
        self.xs: list[float] = []
        self.ys: list[float] = []
        self.area = 0.0

    def insert(self, a: float, b: float) -> None:
        xs, ys = self.xs, self.ys
        first_ge = bisect.bisect_left(xs, a)
        if first_ge < len(xs) and ys[first_ge] >= b:
            return  # weakly dominated
        pos = bisect.bisect_right(xs, a)
        height = ys[pos] if pos < len(xs) else 0.0
        right = a
        j = pos - 1
        added = 0.0
        while j >= 0 and ys[j] <= b:
            added += (right - xs[j]) * (b - height)
            height, right = ys[j], xs[j]
            j -= 1
        left = xs[j] if j >= 0 else 0.0
        added += (right - left) * (b - height)
        del xs[j + 1:pos]
        del ys[j + 1:pos]
        xs.insert(j + 1, a)
        ys.insert(j + 1, b)
        self.area += added


def _hv3(pts: np.ndarray) -> float:
    if pts.shape[0] == 0:
        return 0.0
    order = np.argsort(-pts[:, 2], kind="stable")
    stair = _Staircase()
    volume = 0.0
    prev_z = None
    for x, y, z in pts[order].tolist():
        if prev_z is not None:
            volume += stair.area * (prev_z - z)
        stair.insert(x, y)
        prev_z = z
    volume += stair.area * prev_z
    return volume


# ---------------------------------------------------------------------------
# inclusion-exclusion


def _subset_minima(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise minima and signs ``(-1)**(|J|+1)`` for all subsets J.

    Row ``J`` (as a bitmask over the rows of ``pts``) holds ``m(J)``; row 0 is
    the empty subset and holds ``+inf``.
    """
    k, d = pts.shape
    minima = np.empty((1 << k, d))
    signs = np.empty(1 << k)
    minima[0] = np.inf
    signs[0] = -1.0
    for b in range(k):
        lo, hi = 1 << b, 1 << (b + 1)
        np.minimum(minima[:lo], pts[b], out=minima[lo:hi])
        signs[lo:hi] = -signs[:lo]
    return minima, signs


def _incl_excl_sum(pts: np.ndarray, term: Callable[[np.ndarray], np.ndarray]) -> float:
    """Sum of ``(-1)**(|J|+1) * term(m(J))`` over nonempty subsets J."""
    n = pts.shape[0]
    if n > MAX_INCL_EXCL_POINTS:
        raise TooManyPoints(
            f"inclusion-exclusion is capped at {MAX_INCL_EXCL_POINTS} points, got {n}"
        )
    if n == 0:
        return 0.0
    lo = min(n, _LOW_BITS)
    lo_min, lo_sign = _subset_minima(pts[:lo])
    hi_min, hi_sign = _subset_minima(pts[lo:])
    total = 0.0
    for h in range(hi_min.shape[0]):
        m = np.minimum(lo_min, hi_min[h])
        s = -lo_sign * hi_sign[h]
        if h == 0:
            m, s = m[1:], s[1:]
        total += float(np.dot(s, term(m)))
    return total


def _hv_term(m: np.ndarray) -> np.ndarray:
    return np.prod(m, axis=1)


def _mag_term(m: np.ndarray) -> np.ndarray:
    return np.prod(1.0 + 0.5 * m, axis=1)


def _hv_fast(pts: np.ndarray) -> float:
    d = pts.shape[1]
    if d == 1:
        return _hv1(pts)
    if d == 2:
        return _hv2(pts)
    if d == 3:
        return _hv3(pts)
    return _incl_excl_sum(nondominated_filter(pts, tol=0.0), _hv_term)


# ---------------------------------------------------------------------------
# public API


def hv_2d(points: ArrayLike) -> IndicatorValue:
    """Area of the union of ``[0, p]`` for 2D anchored points, O(n log n)."""
    pts = _anchored(points, 2)
    return IndicatorValue(_hv2(pts), "sweep", 2)


def hv_3d(points: ArrayLike) -> IndicatorValue:
    """Volume of the union of ``[0, p]`` for 3D anchored points.

    Sweeps the third coordinate downwards while maintaining the 2D staircase
    of the points seen so far.
    """
    pts = _anchored(points, 3)
    return IndicatorValue(_hv3(pts), "sweep", 3)


def hv_incl_excl(points: ArrayLike) -> IndicatorValue:
    """Hypervolume by inclusion-exclusion over all ``2**n - 1`` subsets."""
    pts = _anchored(points)
    return IndicatorValue(_incl_excl_sum(pts, _hv_term), "inclusion_exclusion", pts.shape[1])


def mag_incl_excl(points: ArrayLike) -> IndicatorValue:
    """Magnitude by inclusion-exclusion of single-box magnitudes."""
    pts = _anchored(points)
    return IndicatorValue(_incl_excl_sum(pts, _mag_term), "inclusion_exclusion", pts.shape[1])


def projected_hypervolumes(points: ArrayLike) -> list[tuple[tuple[int, ...], float]]:
    """Hypervolume of every nonempty coordinate projection, in canonical order."""
    pts = _anchored(points)
    if pts.shape[0] == 0:
        return [(s, 0.0) for s in coordinate_subsets(pts.shape[1])]
    return [(s, _hv_fast(pts[:, list(s)])) for s in coordinate_subsets(pts.shape[1])]


def magnitude_projection(points: ArrayLike) -> IndicatorValue:
    """Magnitude as ``1 + sum_S 2**-|S| HV(pi_S A)`` over nonempty subsets S.

    Sweeps handle projections of dimension up to 3; larger projections use
    inclusion-exclusion on their nondominated points.
    """
    pts = _anchored(points)
    d = pts.shape[1]
    if pts.shape[0] == 0:
        return IndicatorValue(0.0, "projection", d)
    total = 1.0
    for subset, hv in projected_hypervolumes(pts):
        total += hv / 2.0 ** len(subset)
    return IndicatorValue(total, "projection", d)


def hypervolume(points: ArrayLike, method: str = "auto") -> IndicatorValue:
    """Hypervolume, dispatching on ``method`` (auto, sweep, inclusion_exclusion)."""
    pts = _anchored(points)
    d = pts.shape[1]
    if method == "auto":
        method = "sweep" if d <= 3 else "inclusion_exclusion"
    if method == "sweep":
        if d == 2:
            return hv_2d(pts)
        if d == 3:
            return hv_3d(pts)
        if d == 1:
            return IndicatorValue(_hv1(pts), "sweep", 1)
        raise DimensionMismatch(f"no sweep for dimension {d}")
    if method == "inclusion_exclusion":
        return hv_incl_excl(pts)
    raise ValueError(f"method {method!r} does not apply to hypervolume")


def magnitude(points: ArrayLike, method: str = "auto") -> IndicatorValue:
    """Magnitude, dispatching on ``method``.

    ``auto`` and ``projection`` use the projection formula, ``sweep`` is an
    alias for it, ``inclusion_exclusion`` the subset oracle and
    ``closed_form`` the zero-anchored planar formula (2D only).
    """
    if method in ("auto", "projection", "sweep"):
        return magnitude_projection(points)
    if method == "inclusion_exclusion":
        return mag_incl_excl(points)
    if method == "closed_form":
        return planar_zero_anchored_magnitude(points)
    raise ValueError(f"unknown magnitude method {method!r}")


def box_magnitude_terms(lengths: Sequence[float]) -> list[float]:
    """The expansion ``e_k(L) / 2**k`` for k = 0..n of a box magnitude."""
    L = np.asarray(lengths, dtype=float).ravel()
    if np.any(L < 0):
        raise NegativeLength(f"box side lengths must be nonnegative, got {L.tolist()}")
    # coefficients of prod(1 + L_i t); e_k is the coefficient of t**k
    e = np.array([1.0])
    for li in L:
        e = np.concatenate((e, [0.0])) + np.concatenate(([0.0], li * e))
    return [float(ek / 2.0**k) for k, ek in enumerate(e)]


def box_magnitude(lengths: Sequence[float]) -> IndicatorValue:
    """Magnitude ``prod(1 + L_i / 2)`` of the box with side lengths ``L``."""
    L = np.asarray(lengths, dtype=float).ravel()
    if np.any(L < 0):
        raise NegativeLength(f"box side lengths must be nonnegative, got {L.tolist()}")
    return IndicatorValue(float(np.prod(1.0 + 0.5 * L)), "closed_form", L.size)


def planar_zero_anchored_magnitude(points: ArrayLike) -> IndicatorValue:
    """``1 + (X + Y) / 2 + HV / 4`` for a zero-anchored planar union."""
    pts = _anchored(points, 2)
    if pts.shape[0] == 0:
        return IndicatorValue(0.0, "closed_form", 2)
    x_max, y_max = pts.max(axis=0)
    value = 1.0 + (x_max + y_max) / 2.0 + _hv2(pts) / 4.0
    return IndicatorValue(float(value), "closed_form", 2)


def shadow_decomposition(points: ArrayLike) -> ShadowDecomposition:
    """Split magnitude into the total projected measures ``V_0 .. V_d``."""
    pts = _anchored(points)
    d = pts.shape[1]
    if d > 3:
        raise DimensionMismatch(f"shadow decomposition supports d <= 3, got {d}")
    terms = [0.0] * (d + 1)
    if pts.shape[0] == 0:
        return ShadowDecomposition(tuple(terms))
    terms[0] = 1.0
    for subset, hv in projected_hypervolumes(pts):
        terms[len(subset)] += hv
    return ShadowDecomposition(tuple(terms))


def finite_space_magnitude(points: ArrayLike, metric: str = "l1") -> IndicatorValue:
    """Magnitude of a finite metric space: the sum of ``w`` solving ``Z w = 1``.

    ``Z[i, j] = exp(-d(a_i, a_j))`` with the l1 distance. Only ``"l1"`` is
    supported.
    """
    if metric != "l1":
        raise ValueError(f"only the l1 metric is supported, got {metric!r}")
    pts = as_points(points)
    n = pts.shape[0]
    if n == 0:
        return IndicatorValue(0.0, "closed_form", pts.shape[1])
    if n > MAX_FINITE_SPACE_POINTS:
        raise TooManyPoints(f"finite-space magnitude is capped at {MAX_FINITE_SPACE_POINTS} points")
    dist = cdist(pts, pts, metric="cityblock")
    if np.any(dist[~np.eye(n, dtype=bool)] == 0):
        raise SingularSimilarityMatrix("points must be pairwise distinct")
    Z = np.exp(-dist)
    try:
        w = scipy.linalg.solve(Z, np.ones(n), assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSimilarityMatrix(str(exc)) from exc
    return IndicatorValue(float(w.sum()), "closed_form", pts.shape[1])
