"""Anchored dominated sets: point handling, dominance filtering, projection.

Point sets are plain ``(n, d)`` float arrays. The dominated region
``D(A) = union of [0, a]`` is never built explicitly; every indicator works
from the generating points.

Dominance is in the maximization sense throughout.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterator, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .errors import AnchorAbovePoint, DimensionMismatch, IndexOutOfRange, InvalidLevel

DUPLICATE_TOL = 1e-12


def as_points(points: ArrayLike, dim: int | None = None) -> np.ndarray:
    """Coerce ``points`` to a finite ``(n, d)`` float array.

    An empty input becomes shape ``(0, dim)`` (``dim`` defaults to 0).
    """
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        d = dim if dim is not None else (arr.shape[-1] if arr.ndim == 2 else 0)
        return np.zeros((0, d))
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected an (n, d) array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points contain NaN or infinite coordinates")
    return arr


def translate_to_anchor(points: ArrayLike, anchor: ArrayLike) -> np.ndarray:
    """Shift ``points`` so that ``anchor`` becomes the origin.

    Points lying exactly on an anchor hyperplane are allowed.

    Raises:
        DimensionMismatch: if anchor and points disagree in dimension.
        AnchorAbovePoint: if any coordinate of any point is below the anchor.
    """
    r = np.asarray(anchor, dtype=float).ravel()
    pts = as_points(points, dim=r.size if np.size(points) == 0 else None)
    if pts.shape[1] != r.size:
        raise DimensionMismatch(
            f"anchor has dimension {r.size}, points have dimension {pts.shape[1]}"
        )
    shifted = pts - r
    if np.any(shifted < 0):
        bad = np.argwhere(shifted < 0)[0]
        raise AnchorAbovePoint(
            f"point {bad[0]} has coordinate {bad[1]} below the anchor "
            f"({pts[bad[0], bad[1]]} < {r[bad[1]]})"
        )
    return shifted


def lexicographic_order(points: np.ndarray) -> np.ndarray:
    """Indices sorting the rows of ``points`` lexicographically ascending."""
    if points.shape[0] == 0:
        return np.zeros(0, dtype=int)
    # np.lexsort uses the last key as primary
    return np.lexsort(points.T[::-1])


def active_indices(points: ArrayLike, tol: float = DUPLICATE_TOL) -> np.ndarray:
    """Indices of the nondominated representatives of ``points``.

    A point is dropped if another point strictly dominates it, or if it
    duplicates (within ``tol`` in every coordinate) a point that comes
    earlier in lexicographic order. The returned indices are in
    lexicographic order of the points they refer to.
    """
    pts = as_points(points)
    n = pts.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int)
    order = lexicographic_order(pts)
    p = pts[order]
    keep = np.ones(n, dtype=bool)
    # chunk the O(n^2) comparison to bound memory on large inputs
    chunk = max(1, 2_000_000 // max(1, n * p.shape[1]))
    for start in range(0, n, chunk):
        block = p[start:start + chunk]
        ge = np.all(p[None, :, :] >= block[:, None, :], axis=2)
        close = np.all(np.abs(p[None, :, :] - block[:, None, :]) <= tol, axis=2)
        gt = np.any(p[None, :, :] > block[:, None, :], axis=2)
        dominated = np.any(ge & gt & ~close, axis=1)
        rows = np.arange(start, start + block.shape[0])
        earlier = np.arange(n)[None, :] < rows[:, None]
        duplicate = np.any(close & earlier, axis=1)
        keep[start:start + block.shape[0]] = ~(dominated | duplicate)
    return order[keep]


def nondominated_filter(points: ArrayLike, tol: float = DUPLICATE_TOL) -> np.ndarray:
    """Remove strictly dominated points and collapse near-duplicates.

    The result is sorted lexicographically ascending.

    >>> nondominated_filter([(1, 1), (2, 2)]).tolist()
    [[2.0, 2.0]]
    """
    pts = as_points(points)
    return pts[active_indices(pts, tol)]


def nondominated_layers(points: ArrayLike, tol: float = DUPLICATE_TOL) -> list[np.ndarray]:
    """Peel successive nondominated layers (nondominated sorting).

    Each layer is an index array as returned by :func:`active_indices` on the
    points not yet assigned; near-duplicates of a layer point fall into a
    later layer.
    """
    pts = as_points(points)
    remaining = np.arange(pts.shape[0])
    layers = []
    while remaining.size:
        layer = remaining[active_indices(pts[remaining], tol)]
        layers.append(layer)
        remaining = np.setdiff1d(remaining, layer, assume_unique=True)
    return layers


def project(points: ArrayLike, subset: Sequence[int]) -> np.ndarray:
    """Restrict every point to the coordinates in ``subset`` (0-based)."""
    pts = as_points(points)
    idx = list(subset)
    d = pts.shape[1]
    if any(i < 0 or i >= d for i in idx):
        raise IndexOutOfRange(f"coordinate subset {idx} not within 0..{d - 1}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise IndexOutOfRange(f"coordinate subset {idx} must be strictly increasing")
    return pts[:, idx]


def coordinate_subsets(d: int) -> Iterator[tuple[int, ...]]:
    """Nonempty subsets of ``range(d)`` by size, then lexicographically."""
    for k in range(1, d + 1):
        yield from combinations(range(d), k)


def das_dennis_grid(H: int) -> np.ndarray:
    """Complete simplex lattice ``{(i, j, k) / H : i + j + k = H}`` in 3D.

    Rows are ordered by descending ``i`` then descending ``j``, so the first
    row is the vertex ``(1, 0, 0)``. Each coordinate is computed as an
    integer divided by ``H``, which keeps grid values bitwise reproducible.
    """
    if int(H) != H or H < 1:
        raise InvalidLevel(f"grid level must be a positive integer, got {H}")
    H = int(H)
    rows = [
        (i / H, j / H, (H - i - j) / H)
        for i in range(H, -1, -1)
        for j in range(H - i, -1, -1)
    ]
    return np.array(rows)
