"""Exact tie-shared subgradients of hypervolume and magnitude.

Each inclusion-exclusion term ``(-1)**(|J|+1) * prod_r m_r(J)`` is
differentiated with respect to the coordinate-alpha minimizers of J; when
several points attain the minimum, the derivative is split equally among
them. Tie detection is exact floating equality.

Per-entry sums use ``math.fsum``; the result is then independent of the
order of the points, so relabeling the points together with a coordinate
permutation permutes the subgradient exactly, bit for bit.
"""
from __future__ import annotations

import math
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike

from .errors import DimensionMismatch, TooManyPoints
from .geometry import as_points, coordinate_subsets
from .indicators import _anchored, _subset_minima, hypervolume, magnitude_projection

MAX_SUBGRADIENT_POINTS = 20


def _check(points: ArrayLike) -> np.ndarray:
    pts = _anchored(points)
    n, d = pts.shape
    if n > MAX_SUBGRADIENT_POINTS:
        raise TooManyPoints(
            f"subgradients enumerate subsets and are capped at {MAX_SUBGRADIENT_POINTS} points, got {n}"
        )
    if d not in (2, 3):
        raise DimensionMismatch(f"subgradients support d in (2, 3), got {d}")
    return pts


def _tie_shared_hv(pts: np.ndarray) -> np.ndarray:
    """Tie-shared hypervolume subgradient, any dimension, no input checks."""
    n, d = pts.shape
    grad = np.zeros((n, d))
    if n == 0:
        return grad
    minima, signs = _subset_minima(pts)
    minima, signs = minima[1:], signs[1:]
    masks = np.arange(1, 1 << n)
    members = [((masks >> i) & 1).astype(bool) for i in range(n)]
    for alpha in range(d):
        others = np.prod(np.delete(minima, alpha, axis=1), axis=1)
        m_alpha = minima[:, alpha]
        attains = [members[i] & (pts[i, alpha] == m_alpha) for i in range(n)]
        ties = np.sum(attains, axis=0)
        weight = signs * others / ties
        for i in range(n):
            grad[i, alpha] = math.fsum(weight[attains[i]].tolist())
    return grad


def _max_shared(values: np.ndarray) -> np.ndarray:
    """Derivative of ``max(values)``, split equally among all maximizers."""
    at_max = values == values.max()
    return at_max / at_max.sum()


def hv_subgradient_tie_shared(points: ArrayLike) -> np.ndarray:
    """Per-point hypervolume subgradient, shape ``(n, d)``.

    Away from ties this is the ordinary gradient.
    """
    return _tie_shared_hv(_check(points))


def mag_subgradient(points: ArrayLike) -> np.ndarray:
    """Per-point magnitude subgradient, shape ``(n, d)``.

    Combines ``V_1`` with the max-sharing rule, the tie-shared subgradient of
    each projected area and (for d = 3) of the volume, each weighted by
    ``2**-|S|``.
    """
    pts = _check(points)
    n, d = pts.shape
    if n == 0:
        return np.zeros((n, d))
    parts = []
    for subset in coordinate_subsets(d):
        cols = list(subset)
        part = np.zeros((n, d))
        if len(cols) == 1:
            part[:, cols[0]] = _max_shared(pts[:, cols[0]])
        else:
            part[:, cols] = _tie_shared_hv(pts[:, cols])
        parts.append(part / 2.0 ** len(cols))
    stacked = np.stack(parts)
    return np.array(
        [[math.fsum(stacked[:, i, a].tolist()) for a in range(d)] for i in range(n)]
    )


def finite_difference_gradient(
    indicator: Literal["hv", "mag"],
    points: ArrayLike,
    h: float = 1e-6,
    scheme: Literal["central", "forward", "backward"] = "central",
) -> np.ndarray:
    """Finite-difference gradient of the exact indicator, per coordinate.

    ``forward`` and ``backward`` give the one-sided differences, which bracket
    the tie-shared value at exact ties.
    """
    if h <= 0:
        raise ValueError(f"step h must be positive, got {h}")
    if indicator == "hv":
        f = lambda p: hypervolume(p).value  # noqa: E731
    elif indicator == "mag":
        f = lambda p: magnitude_projection(p).value  # noqa: E731
    else:
        raise ValueError(f"indicator must be 'hv' or 'mag', got {indicator!r}")
    pts = as_points(points)
    lo_step, hi_step = {"central": (-h, h), "forward": (0.0, h), "backward": (-h, 0.0)}[scheme]
    grad = np.zeros_like(pts)
    for i in range(pts.shape[0]):
        for a in range(pts.shape[1]):
            hi = pts.copy()
            lo = pts.copy()
            hi[i, a] += hi_step
            lo[i, a] += lo_step
            grad[i, a] = (f(hi) - f(lo)) / (hi_step - lo_step)
    return grad
