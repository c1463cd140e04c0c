"""Benchmark problems, front-parameter formulas and exact optima.

Three problems are provided:

``parabola``
    ``F(x, y) = (1 - x**2, x**2)`` on ``[-2, 2]**2`` with anchor ``(-3, 0)``.
    The translated front is ``(4 - t, t)`` with ``t = x**2``. Ascent runs use
    the branch ``x in [0, 2]``; ``y`` has no influence.
``quadratic``
    ``F(x, y) = (1 - (x-1)**2 - y**2, 1 - (x+1)**2 - y**2)`` on ``[-2, 2]**2``
    with anchor ``(-4, -4)``; the efficient set is ``{(x, 0): |x| <= 1}``.
``simplex3d``
    Points of the unit simplex optimized directly (identity objective map),
    anchored at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .errors import (
    InfeasiblePoint,
    InvalidLevel,
    InvalidMu,
    InvalidTriple,
    PerturbationLeavesSimplex,
    PointNotOnGrid,
    UnsortedParameters,
)
from .geometry import das_dennis_grid
from .indicators import mag_incl_excl
from .optimizer import project_box, project_simplex, simplex_tangent_project

FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class ProblemHandle:
    name: str
    decision_dim: int
    objective_dim: int
    anchor: np.ndarray
    objective_map: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] = field(repr=False)
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    simplex: bool = False
    # box used by the ascent when it differs from the problem domain
    search_lower: np.ndarray | None = None
    search_upper: np.ndarray | None = None

    def is_feasible(self, z: ArrayLike) -> bool:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.decision_dim,) or not np.all(np.isfinite(z)):
            return False
        if self.simplex:
            return bool(np.all(z >= -FEASIBILITY_TOL) and abs(z.sum() - 1.0) <= FEASIBILITY_TOL)
        lo = self.search_lower if self.search_lower is not None else self.lower
        hi = self.search_upper if self.search_upper is not None else self.upper
        return bool(np.all(z >= lo) and np.all(z <= hi))

    def in_domain(self, z: ArrayLike) -> bool:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.decision_dim,) or not np.all(np.isfinite(z)):
            return False
        if self.simplex:
            return bool(np.all(z >= -FEASIBILITY_TOL) and abs(z.sum() - 1.0) <= FEASIBILITY_TOL)
        return bool(np.all(z >= self.lower) and np.all(z <= self.upper))

    def evaluate(self, z: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
        """Objective vector and Jacobian (``objective_dim x decision_dim``)."""
        z = np.asarray(z, dtype=float)
        if not self.in_domain(z):
            raise InfeasiblePoint(f"{z.tolist()} is outside the domain of {self.name}")
        return self.objective_map(z)

    def project(self, z: np.ndarray) -> np.ndarray:
        if self.simplex:
            return project_simplex(z)
        lo = self.search_lower if self.search_lower is not None else self.lower
        hi = self.search_upper if self.search_upper is not None else self.upper
        return project_box(z, lo, hi)

    def tangent(self, v: np.ndarray) -> np.ndarray:
        return simplex_tangent_project(v) if self.simplex else v


def _parabola(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = z[0]
    f = np.array([1.0 - x * x, x * x])
    jac = np.array([[-2.0 * x, 0.0], [2.0 * x, 0.0]])
    return f, jac


def _quadratic(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x, y = z
    f = np.array([1.0 - (x - 1.0) ** 2 - y * y, 1.0 - (x + 1.0) ** 2 - y * y])
    jac = np.array([[-2.0 * (x - 1.0), -2.0 * y], [-2.0 * (x + 1.0), -2.0 * y]])
    return f, jac


def _identity(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return z.copy(), np.eye(z.size)


PARABOLA = ProblemHandle(
    name="parabola",
    decision_dim=2,
    objective_dim=2,
    anchor=np.array([-3.0, 0.0]),
    objective_map=_parabola,
    lower=np.array([-2.0, -2.0]),
    upper=np.array([2.0, 2.0]),
    search_lower=np.array([0.0, -2.0]),
    search_upper=np.array([2.0, 2.0]),
)

QUADRATIC = ProblemHandle(
    name="quadratic",
    decision_dim=2,
    objective_dim=2,
    anchor=np.array([-4.0, -4.0]),
    objective_map=_quadratic,
    lower=np.array([-2.0, -2.0]),
    upper=np.array([2.0, 2.0]),
)

SIMPLEX3D = ProblemHandle(
    name="simplex3d",
    decision_dim=3,
    objective_dim=3,
    anchor=np.zeros(3),
    objective_map=_identity,
    simplex=True,
)

PROBLEMS = {p.name: p for p in (PARABOLA, QUADRATIC, SIMPLEX3D)}

# starting branch values x_i (y_i = 0) of the reference mu = 8 parabola run (`--init paper`)
PARABOLA_REFERENCE_START = (0.2076, 0.3903, 0.7841, 1.0471, 1.2343, 1.6137, 1.8890, 1.9537)


def get_problem(name: str) -> ProblemHandle:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None


def evaluate(problem: ProblemHandle | str, z: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(problem, str):
        problem = get_problem(problem)
    return problem.evaluate(z)


def random_population(problem: ProblemHandle, mu: int, seed: int, max_draws: int = 100_000) -> np.ndarray:
    """Uniform draws from the search region, kept only if the images are
    above the anchor and mutually nondominated.
    """
    rng = np.random.default_rng(seed)
    if problem.simplex:
        return rng.dirichlet(np.ones(problem.decision_dim), size=mu)
    lo = problem.search_lower if problem.search_lower is not None else problem.lower
    hi = problem.search_upper if problem.search_upper is not None else problem.upper
    members: list[np.ndarray] = []
    images: list[np.ndarray] = []
    for _ in range(max_draws):
        z = rng.uniform(lo, hi)
        f = problem.evaluate(z)[0] - problem.anchor
        if np.any(f < 0):
            continue
        if any(np.all(g >= f) or np.all(f >= g) for g in images):
            continue
        members.append(z)
        images.append(f)
        if len(members) == mu:
            return np.array(members)
    raise RuntimeError(f"could not draw {mu} mutually nondominated members")


# ---------------------------------------------------------------------------
# parabola front parameter formulas


def _sorted_params(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=float).ravel()
    if t.size == 0:
        raise UnsortedParameters("need at least one front parameter")
    if np.any(np.diff(t) < 0) or t[0] < 0 or t[-1] > 4:
        raise UnsortedParameters(f"front parameters must satisfy 0 <= t_1 <= ... <= t_mu <= 4, got {t.tolist()}")
    return t


def front_hv(t: ArrayLike) -> float:
    """``sum (t_i - t_{i-1}) (4 - t_i)`` with ``t_0 = 0``."""
    t = _sorted_params(t)
    prev = np.concatenate(([0.0], t[:-1]))
    return float(np.sum((t - prev) * (4.0 - t)))


def front_hv_gradient(t: ArrayLike) -> np.ndarray:
    t = _sorted_params(t)
    prev = np.concatenate(([0.0], t[:-1]))
    nxt = np.concatenate((t[1:], [4.0]))
    # the last entry reduces to 4 - 2 t_mu + t_{mu-1}
    return prev + nxt - 2.0 * t


def front_mag(t: ArrayLike) -> float:
    """``1 + (4 - t_1 + t_mu) / 2 + HV / 4``."""
    t = _sorted_params(t)
    return float(1.0 + (4.0 - t[0] + t[-1]) / 2.0 + front_hv(t) / 4.0)


def front_mag_gradient(t: ArrayLike) -> np.ndarray:
    t = _sorted_params(t)
    grad = front_hv_gradient(t) / 4.0
    grad[0] -= 0.5
    grad[-1] += 0.5
    return grad


def front_projected_gradient(t: ArrayLike, grad: ArrayLike) -> np.ndarray:
    """Drop gradient components that push an active bound of ``[0, 4]`` outward.

    At a constrained maximizer the remaining (projected) gradient vanishes.
    """
    t = _sorted_params(t)
    g = np.array(grad, dtype=float)
    g[(t <= 0.0) & (g < 0)] = 0.0
    g[(t >= 4.0) & (g > 0)] = 0.0
    return g


def front_points(t: ArrayLike) -> np.ndarray:
    """Translated objective vectors ``(4 - t_i, t_i)``."""
    t = np.asarray(t, dtype=float).ravel()
    return np.column_stack((4.0 - t, t))


def optimal_distribution(problem: str, indicator: str, mu: int) -> np.ndarray:
    """Closed-form optimal front parameters on the parabola problem.

    HV: ``t_i = 4 i / (mu + 1)``; magnitude: ``t_i = 4 (i - 1) / (mu - 1)``.
    Branch coordinates are ``x_i = sqrt(t_i)``.
    """
    if problem != "parabola":
        raise ValueError(f"closed-form optima are only known for 'parabola', got {problem!r}")
    i = np.arange(1, mu + 1, dtype=float)
    if indicator == "hv":
        if mu < 1:
            raise InvalidMu(f"mu must be >= 1, got {mu}")
        return 4.0 * i / (mu + 1)
    if indicator == "mag":
        if mu < 2:
            raise InvalidMu(f"the magnitude optimum needs mu >= 2, got {mu}")
        return 4.0 * (i - 1.0) / (mu - 1)
    raise ValueError(f"indicator must be 'hv' or 'mag', got {indicator!r}")


# ---------------------------------------------------------------------------
# symmetric six-point orbits on the simplex

_SQRT13 = math.sqrt(13.0)
HV_ORBIT_TRIPLE = (
    (62.0 + 5.0 * _SQRT13) / 153.0,
    (43.0 + _SQRT13) / 153.0,
    (48.0 - 6.0 * _SQRT13) / 153.0,
)
# reference boundary orbit; on w = 0 the closed form is 5/2 - 9 v**2 / 4
MAG_ORBIT_TRIPLE = (7.0 / 9.0, 2.0 / 9.0, 0.0)
# orbit of the 10-point HV terminal population (plus centroid and vertices)
HV10_ORBIT_TRIPLE = (15.0 / 27.0, 8.0 / 27.0, 4.0 / 27.0)

_PERMUTATIONS = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))


def _check_triple(u: float, v: float, w: float) -> None:
    if not (u >= v >= w >= 0) or abs(u + v + w - 1.0) > FEASIBILITY_TOL:
        raise InvalidTriple(f"need u >= v >= w >= 0 and u + v + w = 1, got {(u, v, w)}")


def orbit_points(u: float, v: float, w: float) -> np.ndarray:
    """The six coordinate permutations of ``(u, v, w)``."""
    _check_triple(u, v, w)
    base = (u, v, w)
    return np.array([[base[i] for i in perm] for perm in _PERMUTATIONS])


def orbit_hv(u: float, v: float, w: float) -> float:
    _check_triple(u, v, w)
    return 6 * u * v * w - 3 * u * w * w - 3 * v * v * w + w**3


def orbit_mag(u: float, v: float, w: float) -> float:
    _check_triple(u, v, w)
    return 1.0 + 1.5 * u + 0.75 * (2 * u * v - v * v) + orbit_hv(u, v, w) / 8.0


# ---------------------------------------------------------------------------
# complete Das-Dennis grids


def _check_level(H: int) -> int:
    if int(H) != H or H < 1:
        raise InvalidLevel(f"grid level must be a positive integer, got {H}")
    return int(H)


def das_dennis_closed_form_hv(H: int) -> float:
    H = _check_level(H)
    return (H - 1) * (H - 2) / (6.0 * H * H)


def das_dennis_closed_form_area(H: int) -> float:
    """Area of each 2D coordinate projection of the grid's dominated set."""
    H = _check_level(H)
    return (H - 1) / (2.0 * H)


def das_dennis_closed_form_mag(H: int) -> float:
    H = _check_level(H)
    return 2.5 + 3.0 * (H - 1) / (8.0 * H) + (H - 1) * (H - 2) / (48.0 * H * H)


# ---------------------------------------------------------------------------
# stationarity probes


@dataclass(frozen=True)
class ProbeRecord:
    eps: float
    delta_mag: float


@dataclass(frozen=True)
class ProbeResult:
    H: int
    point: tuple[float, ...]
    direction: tuple[float, ...]
    records: tuple[ProbeRecord, ...]
    fitted_order: int
    fitted_coeff: float
    slope: float

    def to_records(self) -> list[dict]:
        return [
            {
                "H": self.H,
                "point": list(self.point),
                "direction": list(self.direction),
                "eps": r.eps,
                "delta_mag": r.delta_mag,
                "fitted_order": self.fitted_order,
                "fitted_coeff": self.fitted_coeff,
            }
            for r in self.records
        ]


def fit_power_law(
    eps: Sequence[float], delta: Sequence[float], order: int | None = None
) -> tuple[int, float, float]:
    """Classify ``delta ~ c * eps**k`` as linear or quadratic and fit ``c``.

    The order is the log-log slope of ``|delta|`` rounded to 1 or 2; with
    fewer than two usable samples it defaults to 2 unless ``order`` is given.
    ``c`` is the least squares coefficient for that order.
    """
    e = np.asarray(eps, dtype=float)
    d = np.asarray(delta, dtype=float)
    usable = np.abs(d) > 0
    slope = float("nan")
    if np.unique(e[usable]).size >= 2:
        slope = float(np.polyfit(np.log(e[usable]), np.log(np.abs(d[usable])), 1)[0])
    if order is None:
        order = 1 if slope < 1.5 else 2
    basis = e**order
    coeff = float(np.dot(basis, d) / np.dot(basis, basis))
    return order, coeff, slope


def stationarity_probe(
    H: int,
    point: ArrayLike,
    direction: ArrayLike,
    eps_list: Sequence[float] = (1e-3, 1e-2, 5e-2),
    order: int | None = None,
) -> ProbeResult:
    """Perturb one grid point along ``direction`` and record the magnitude change.

    Every perturbed set is evaluated with the inclusion-exclusion oracle.
    """
    H = _check_level(H)
    grid = das_dennis_grid(H)
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    hits = np.nonzero(np.all(np.abs(grid - p) <= FEASIBILITY_TOL, axis=1))[0]
    if hits.size == 0:
        raise PointNotOnGrid(f"{p.tolist()} is not a point of the level-{H} grid")
    if abs(d.sum()) > FEASIBILITY_TOL:
        raise PerturbationLeavesSimplex(f"direction {d.tolist()} is not tangent (sum {d.sum()})")
    idx = int(hits[0])
    base = mag_incl_excl(grid).value
    records = []
    for eps in eps_list:
        q = grid[idx] + eps * d
        if np.any(q < -FEASIBILITY_TOL):
            raise PerturbationLeavesSimplex(f"eps={eps} moves {grid[idx].tolist()} off the simplex")
        perturbed = grid.copy()
        perturbed[idx] = np.maximum(q, 0.0)
        records.append(ProbeRecord(float(eps), mag_incl_excl(perturbed).value - base))
    order, coeff, slope = fit_power_law(
        [r.eps for r in records], [r.delta_mag for r in records], order
    )
    return ProbeResult(
        H, tuple(grid[idx].tolist()), tuple(d.tolist()), tuple(records), order, coeff, slope
    )


def grid_point(H: int, selector: str) -> tuple[np.ndarray, np.ndarray]:
    """Resolve a probe selector into a grid point and a default direction.

    ``centroid`` (H divisible by 3), ``edge:i,j,k`` (integer grid indices with
    ``i + j + k = H``) and ``vertex:i`` (1-based coordinate) are accepted.
    """
    H = _check_level(H)
    if selector == "centroid":
        if H % 3:
            raise PointNotOnGrid(f"the centroid is not a point of the level-{H} grid")
        return np.full(3, (H // 3) / H), np.array([1.0, -1.0, 0.0])
    kind, _, arg = selector.partition(":")
    if kind == "edge":
        ijk = [int(s) for s in arg.split(",")]
        if len(ijk) != 3 or sum(ijk) != H or min(ijk) < 0:
            raise PointNotOnGrid(f"edge indices must be three nonnegative integers summing to {H}")
        return np.array([c / H for c in ijk]), np.array([1.0, -1.0, 0.0])
    if kind == "vertex":
        i = int(arg) - 1
        if not 0 <= i < 3:
            raise PointNotOnGrid(f"vertex index must be 1, 2 or 3, got {arg}")
        p = np.zeros(3)
        p[i] = 1.0
        d = np.full(3, 0.5)
        d[i] = -1.0
        return p, d
    raise ValueError(f"unknown point selector {selector!r}")
