"""Projected set-gradient ascent for populations.

Each iteration maps the population to objective space, translates by the
problem's anchor, picks the active (nondominated, deduplicated) members,
evaluates the tie-shared indicator subgradient, pulls it back through the
objective Jacobian, normalizes, steps and projects onto the feasible region.

Inactive (dominated or duplicate) members are handled by ``inactive``:
``"freeze"`` keeps them in place; ``"layered"`` (default) sorts the members
into nondominated layers and moves each member along the indicator gradient
of its own layer, so dominated members work their way back to the front.
Layered acceptance compares layer values lexicographically, front first.
With a single layer both modes coincide.
"""
from __future__ import annotations

import math

from dataclasses import asdict, dataclass, field
from typing import Callable, Literal, Protocol

import numpy as np
from numpy.typing import ArrayLike

from .errors import InfeasibleStart, InvalidBounds, NonFiniteObjective
from .geometry import active_indices, nondominated_layers
from .indicators import hypervolume, magnitude_projection
from .subgradients import hv_subgradient_tie_shared, mag_subgradient

IMPROVEMENT_TOL = 1e-14


class Problem(Protocol):
    name: str
    decision_dim: int
    objective_dim: int
    anchor: np.ndarray

    def evaluate(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...

    def project(self, z: np.ndarray) -> np.ndarray: ...

    def tangent(self, v: np.ndarray) -> np.ndarray: ...

    def is_feasible(self, z: np.ndarray) -> bool: ...


@dataclass
class AscentConfig:
    indicator: Literal["hv", "mag"] = "hv"
    max_iters: int = 5000
    step_init: float = 0.08
    schedule: Literal["geometric", "backtracking"] = "geometric"
    decay: float = 0.9995
    shrink: float = 0.5
    max_halvings: int = 30
    seed: int = 0
    step_min: float = 1e-15
    grad_min: float = 1e-12
    normalize: bool = True
    record_every: int = 1
    inactive: Literal["layered", "freeze"] = "layered"

    def __post_init__(self) -> None:
        if self.indicator not in ("hv", "mag"):
            raise ValueError(f"indicator must be 'hv' or 'mag', got {self.indicator!r}")
        if self.schedule not in ("geometric", "backtracking"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.step_init <= 0:
            raise ValueError("step_init must be positive")
        if not 0 < self.decay <= 1:
            raise ValueError("decay must lie in (0, 1]")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.step_min <= 0:
            raise ValueError("step_min must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be positive")
        if self.inactive not in ("layered", "freeze"):
            raise ValueError(f"inactive must be 'layered' or 'freeze', got {self.inactive!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Snapshot:
    iteration: int
    decision: np.ndarray
    objectives: np.ndarray
    value: float


@dataclass
class AscentTrajectory:
    iterations: list[Snapshot] = field(default_factory=list)
    accepted_steps: int = 0
    stop_reason: str = ""

    @property
    def terminal(self) -> Snapshot:
        return self.iterations[-1]


@dataclass
class LineSearchResult:
    accepted: bool
    step: float
    population: np.ndarray
    value: float


# ---------------------------------------------------------------------------
# elementary operations


def pullback_direction(jacobian: ArrayLike, objective_gradient: ArrayLike) -> np.ndarray:
    """``J.T @ g`` scaled to unit length, or zeros when it vanishes exactly."""
    v = np.asarray(jacobian, dtype=float).T @ np.asarray(objective_gradient, dtype=float)
    norm = _norm(v)
    if norm == 0:
        return np.zeros_like(v)
    return v / norm


def simplex_tangent_project(g: ArrayLike) -> np.ndarray:
    """Orthogonal projection onto the plane of zero coordinate sum."""
    g = np.asarray(g, dtype=float)
    if g.ndim == 1:
        return g - math.fsum(g.tolist()) / g.size
    return g - g.mean(axis=-1, keepdims=True)


def _norm(v: np.ndarray) -> float:
    # order-independent, so symmetric inputs give bitwise symmetric steps
    return math.sqrt(math.fsum((v * v).tolist()))


def project_simplex(p: ArrayLike) -> np.ndarray:
    """Euclidean projection onto ``{z >= 0, sum(z) = 1}`` (sort-based)."""
    v = np.asarray(p, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def project_box(p: ArrayLike, lower: ArrayLike, upper: ArrayLike) -> np.ndarray:
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise InvalidBounds(f"lower bound {lower.tolist()} exceeds upper bound {upper.tolist()}")
    return np.clip(np.asarray(p, dtype=float), lower, upper)


def _improves(new, base, tol: float) -> bool:
    """Lexicographic improvement; scalars act as 1-tuples, missing entries as 0."""
    new = (new,) if np.isscalar(new) else tuple(new)
    base = (base,) if np.isscalar(base) else tuple(base)
    width = max(len(new), len(base))
    new = new + (0.0,) * (width - len(new))
    base = base + (0.0,) * (width - len(base))
    for a, b in zip(new, base):
        if a > b + tol:
            return True
        if a < b - tol:
            return False
    return False


def backtracking_line_search(
    evaluate: Callable[[np.ndarray], float | tuple[float, ...]],
    population: np.ndarray,
    directions: np.ndarray,
    eta0: float,
    shrink: float = 0.5,
    max_halvings: int = 30,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    current: float | None = None,
    tol: float = IMPROVEMENT_TOL,
) -> LineSearchResult:
    """Try ``eta0 * shrink**k`` for k = 0..max_halvings, largest first.

    A trial is accepted when the indicator increases by more than ``tol``.
    ``evaluate`` may instead return a tuple of layer values, compared
    lexicographically: the first entry that moves by more than ``tol``
    decides. On rejection the population is returned unchanged.
    """
    population = np.asarray(population, dtype=float)
    base = evaluate(population) if current is None else current
    eta = eta0
    for _ in range(max_halvings + 1):
        trial = population + eta * directions
        if project is not None:
            trial = project(trial)
        value = evaluate(trial)
        if _improves(value, base, tol):
            return LineSearchResult(True, eta, trial, value)
        eta *= shrink
    return LineSearchResult(False, 0.0, population, base)


# ---------------------------------------------------------------------------
# ascent driver


def _indicator_fns(indicator: str):
    if indicator == "hv":
        return (lambda p: hypervolume(p).value), hv_subgradient_tie_shared
    return (lambda p: magnitude_projection(p).value), mag_subgradient


class _Evaluator:
    """Objective values, translated points and active set for a population."""

    def __init__(self, problem: Problem, indicator: str) -> None:
        self.problem = problem
        self.value_fn, self.grad_fn = _indicator_fns(indicator)

    def objectives(self, population: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        values, jacobians = [], []
        for z in population:
            f, jac = self.problem.evaluate(z)
            if not np.all(np.isfinite(f)) or not np.all(np.isfinite(jac)):
                raise NonFiniteObjective(f"objective evaluation failed at {z.tolist()}")
            values.append(f)
            jacobians.append(jac)
        return np.array(values), jacobians

    def active(self, objectives: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Translated objectives and indices of active members.

        Members below the anchor in any coordinate contribute nothing and are
        treated as inactive.
        """
        shifted = objectives - self.problem.anchor
        above = np.nonzero(np.all(shifted >= 0, axis=1))[0]
        idx = above[active_indices(shifted[above])]
        return shifted, idx

    def layers(self, objectives: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Translated objectives and the nondominated layers above the anchor."""
        shifted = objectives - self.problem.anchor
        above = np.nonzero(np.all(shifted >= 0, axis=1))[0]
        return shifted, [above[layer] for layer in nondominated_layers(shifted[above])]

    def value(self, population: np.ndarray) -> float:
        objectives, _ = self.objectives(population)
        shifted, idx = self.active(objectives)
        return self.value_fn(shifted[idx]) if idx.size else 0.0

    def layer_values(self, population: np.ndarray) -> tuple[float, ...]:
        objectives, _ = self.objectives(population)
        shifted, layers = self.layers(objectives)
        return tuple(self.value_fn(shifted[layer]) for layer in layers) or (0.0,)


def ascent_directions(
    problem: Problem,
    population: np.ndarray,
    evaluator: _Evaluator,
    normalize: bool,
    inactive: str = "freeze",
) -> tuple[np.ndarray, np.ndarray, float, np.ndarray]:
    """Per-member ascent directions for one iteration.

    Returns the directions, the tangent-projected gradient norms, the current
    indicator value (of the active set) and the objective vectors.
    """
    objectives, jacobians = evaluator.objectives(population)
    directions = np.zeros_like(population)
    norms = np.zeros(population.shape[0])
    if inactive == "layered":
        shifted, groups = evaluator.layers(objectives)
    else:
        shifted, idx = evaluator.active(objectives)
        groups = [idx] if idx.size else []
    if not groups:
        return directions, norms, 0.0, objectives
    value = evaluator.value_fn(shifted[groups[0]])
    for group in groups:
        grads = evaluator.grad_fn(shifted[group])
        for row, member in enumerate(group):
            v = problem.tangent(jacobians[member].T @ grads[row])
            norm = _norm(v)
            norms[member] = norm
            if norm == 0:
                continue
            directions[member] = v / norm if normalize else v
    return directions, norms, value, objectives


def run_ascent(problem: Problem, population: ArrayLike, config: AscentConfig) -> AscentTrajectory:
    """Projected set-gradient ascent; returns the recorded trajectory.

    Stops after ``config.max_iters`` iterations, when every tangent-projected
    gradient has norm below ``grad_min``, when the geometric step falls below
    ``step_min``, or when backtracking rejects every trial step.
    """
    pop = np.array(population, dtype=float)
    if pop.ndim != 2 or pop.shape[1] != problem.decision_dim:
        raise InfeasibleStart(
            f"population must have shape (mu, {problem.decision_dim}), got {pop.shape}"
        )
    for z in pop:
        if not problem.is_feasible(z):
            raise InfeasibleStart(f"member {z.tolist()} lies outside the feasible region")

    evaluator = _Evaluator(problem, config.indicator)
    project_all = lambda P: np.array([problem.project(z) for z in P])  # noqa: E731
    traj = AscentTrajectory()

    def record(k: int, P: np.ndarray, objectives: np.ndarray, value: float) -> None:
        traj.iterations.append(Snapshot(k, P.copy(), objectives.copy(), value))

    stop = "max_iters"
    value = float("nan")
    objectives = None
    for k in range(config.max_iters):
        directions, norms, value, objectives = ascent_directions(
            problem, pop, evaluator, config.normalize, config.inactive
        )
        if k % config.record_every == 0:
            record(k, pop, objectives, value)
        if np.all(norms < config.grad_min):
            stop = "stationary"
            break
        if config.schedule == "geometric":
            eta = config.step_init * config.decay**k
            if eta < config.step_min:
                stop = "step_min"
                break
            pop = project_all(pop + eta * directions)
            traj.accepted_steps += 1
        else:
            layered = config.inactive == "layered"
            result = backtracking_line_search(
                evaluator.layer_values if layered else evaluator.value,
                pop,
                directions,
                config.step_init,
                config.shrink,
                config.max_halvings,
                project=project_all,
                current=evaluator.layer_values(pop) if layered else value,
            )
            if not result.accepted:
                stop = "rejected"
                break
            pop = result.population
            traj.accepted_steps += 1
    else:
        k = config.max_iters
        objectives, _ = evaluator.objectives(pop)
        value = evaluator.value(pop)

    last = traj.iterations[-1] if traj.iterations else None
    if last is None or last.iteration != k or not np.array_equal(last.decision, pop):
        record(k, pop, objectives, value)
    traj.stop_reason = stop
    return traj
