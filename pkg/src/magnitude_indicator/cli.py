"""Command-line front end.

Subcommands ``indicator``, ``ascent``, ``grid`` and ``stationarity`` share the
flags ``--out``, ``--format``, ``--seed`` and ``--verify``. Every run that
writes ``--out`` also writes ``<out>.manifest.json``.

Exit codes: 0 on success, 1 when a ``--verify`` cross-check disagrees,
2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields
from typing import Sequence

import numpy as np

from . import __version__
from .errors import MagnitudeError
from .geometry import das_dennis_grid, nondominated_filter, translate_to_anchor
from .indicators import (
    MAX_INCL_EXCL_POINTS,
    hv_incl_excl,
    hypervolume,
    mag_incl_excl,
    magnitude,
    magnitude_projection,
    shadow_decomposition,
)
from .io import fmt, read_points, rounded, write_json, write_points, write_rows
from .optimizer import AscentConfig, AscentTrajectory, run_ascent
from .problems import (
    PARABOLA_REFERENCE_START,
    ProblemHandle,
    das_dennis_closed_form_hv,
    das_dennis_closed_form_mag,
    get_problem,
    grid_point,
    random_population,
    stationarity_probe,
)

VERIFY_TOL = 1e-9

# per-problem ascent defaults; explicit flags and --config override them
PROBLEM_DEFAULTS = {
    "parabola": dict(
        schedule="geometric", step_init=0.08, decay=0.9995, max_iters=5000, normalize=False, init="paper"
    ),
    "quadratic": dict(schedule="backtracking", step_init=0.05, max_iters=20000, init="random"),
    "simplex3d": dict(schedule="backtracking", step_init=0.05, max_iters=20000, init="das-dennis:3"),
}


class VerificationError(Exception):
    """A ``--verify`` cross-check disagreed."""


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _check_close(label: str, fast: float, oracle: float) -> None:
    if abs(fast - oracle) > VERIFY_TOL * max(1.0, abs(oracle)):
        raise VerificationError(f"{label}: fast path {fast!r} != oracle {oracle!r}")


class _Run:
    """Collects output paths and writes the manifest."""

    def __init__(self, args: argparse.Namespace, argv: Sequence[str]) -> None:
        self.args = args
        self.argv = list(argv)
        self.start = time.perf_counter()
        self.outputs: list[str] = []
        self.config: dict = {}

    def output(self, suffix: str = "") -> str | None:
        if self.args.out is None:
            return None
        path = self.args.out + suffix
        self.outputs.append(path)
        return path

    def finish(self) -> None:
        if self.args.out is None:
            return
        manifest = {
            "command": self.args.command,
            "argv": self.argv,
            "config": self.config,
            "version": __version__,
            "seed": self.args.seed,
            "wall_time_s": time.perf_counter() - self.start,
            "outputs": self.outputs,
        }
        with open(self.args.out + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# indicator


def cmd_indicator(args: argparse.Namespace, run: _Run) -> None:
    points = read_points(args.points)
    anchor = args.anchor if args.anchor is not None else [0.0] * points.shape[1]
    pts = translate_to_anchor(points, anchor)
    if args.indicator == "hv":
        result = hypervolume(pts, args.method)
    else:
        result = magnitude(pts, args.method)
    run.config = {
        "points": args.points,
        "anchor": list(anchor),
        "indicator": args.indicator,
        "method": args.method,
        "decompose": args.decompose,
    }
    report = {
        "indicator": args.indicator,
        "method": result.method,
        "dimension": result.dimension,
        "n": int(pts.shape[0]),
        "value": result.value,
    }
    print(f"{args.indicator} = {result.value:.12f}")
    if args.decompose:
        decomposition = shadow_decomposition(pts).to_dict()
        report["decomposition"] = decomposition
        print(json.dumps(rounded(decomposition)))
    if args.verify:
        front = nondominated_filter(pts)
        if front.shape[0] > MAX_INCL_EXCL_POINTS:
            raise VerificationError(
                f"oracle needs at most {MAX_INCL_EXCL_POINTS} nondominated points, got {front.shape[0]}"
            )
        oracle = hv_incl_excl(front) if args.indicator == "hv" else mag_incl_excl(front)
        _check_close(args.indicator, result.value, oracle.value)
        print(f"verify: ok (inclusion_exclusion {oracle.value:.12f})")
    path = run.output()
    if path:
        if args.format == "json":
            write_json(path, report)
        else:
            write_rows(path, ["indicator", "method", "value"], [[args.indicator, result.method, result.value]])


# ---------------------------------------------------------------------------
# ascent


def _initial_population(problem: ProblemHandle, init: str, mu: int | None, seed: int) -> np.ndarray:
    if init == "paper":
        if problem.name != "parabola":
            raise ValueError("--init paper is only defined for the parabola problem")
        pop = np.column_stack((PARABOLA_REFERENCE_START, np.zeros(len(PARABOLA_REFERENCE_START))))
    elif init == "random":
        if mu is None:
            raise ValueError("--init random needs --mu")
        pop = random_population(problem, mu, seed)
    elif init.startswith("das-dennis:"):
        if not problem.simplex:
            raise ValueError("--init das-dennis:H is only defined for the simplex3d problem")
        parts = init.split(":")
        try:
            H = int(parts[1])
        except (IndexError, ValueError):
            raise ValueError(f"bad grid init {init!r}; use das-dennis:H[:no-centroid]") from None
        pop = das_dennis_grid(H)
        if parts[2:] == ["no-centroid"]:
            if H % 3:
                raise ValueError(f"the level-{H} grid has no centroid")
            centroid = np.all(np.abs(pop - 1.0 / 3.0) <= 1e-12, axis=1)
            pop = pop[~centroid]
        elif parts[2:]:
            raise ValueError(f"bad grid init {init!r}; use das-dennis:H[:no-centroid]")
    else:
        raise ValueError(f"unknown init {init!r}; use paper, random or das-dennis:H[:no-centroid]")
    if mu is not None and pop.shape[0] != mu:
        raise ValueError(f"--init {init} gives {pop.shape[0]} members but --mu is {mu}")
    return pop


def _ascent_config(args: argparse.Namespace) -> tuple[AscentConfig, str]:
    settings = dict(PROBLEM_DEFAULTS[args.problem])
    if args.config:
        with open(args.config) as fh:
            settings.update(json.load(fh))
    flags = {
        "indicator": args.indicator,
        "schedule": args.schedule,
        "max_iters": args.iters,
        "step_init": args.step,
        "decay": args.decay,
        "shrink": args.shrink,
        "max_halvings": args.max_halvings,
        "record_every": args.record_every,
        "normalize": args.normalize,
        "inactive": args.inactive,
        "init": args.init,
    }
    settings.update({k: v for k, v in flags.items() if v is not None})
    settings["seed"] = args.seed
    init = settings.pop("init")
    known = {f.name for f in fields(AscentConfig)}
    unknown = sorted(set(settings) - known)
    if unknown:
        raise ValueError(f"unknown ascent settings: {', '.join(unknown)}")
    return AscentConfig(**settings), init


def _trajectory_rows(traj: AscentTrajectory):
    for snap in traj.iterations:
        for m, (z, f) in enumerate(zip(snap.decision, snap.objectives)):
            yield [snap.iteration, m, *map(float, z), *map(float, f), float(snap.value)]


def cmd_ascent(args: argparse.Namespace, run: _Run) -> None:
    problem = get_problem(args.problem)
    config, init = _ascent_config(args)
    pop = _initial_population(problem, init, args.mu, args.seed)
    run.config = {"problem": problem.name, "mu": int(pop.shape[0]), "init": init, **config.to_dict()}
    traj = run_ascent(problem, pop, config)
    final = traj.terminal
    print(f"stop: {traj.stop_reason} after {final.iteration} iterations ({traj.accepted_steps} accepted)")
    for z in final.decision:
        print("  " + ", ".join(f"{v:.12f}" for v in z))
    print(f"{config.indicator} = {final.value:.12f}")
    if args.verify:
        shifted = final.objectives - problem.anchor
        above = shifted[np.all(shifted >= 0, axis=1)]
        front = nondominated_filter(above)
        oracle = hv_incl_excl(front) if config.indicator == "hv" else mag_incl_excl(front)
        _check_close(config.indicator, final.value, oracle.value)
        print(f"verify: ok (inclusion_exclusion {oracle.value:.12f})")
    path = run.output()
    if path:
        header = (
            ["iter", "member_index"]
            + [f"z{i + 1}" for i in range(problem.decision_dim)]
            + [f"f{i + 1}" for i in range(problem.objective_dim)]
            + ["indicator_value"]
        )
        rows = list(_trajectory_rows(traj))
        if args.format == "json":
            write_json(path, {
                "stop_reason": traj.stop_reason,
                "accepted_steps": traj.accepted_steps,
                "rows": [dict(zip(header, row)) for row in rows],
            })
        else:
            write_rows(path, header, rows)


# ---------------------------------------------------------------------------
# grid


def cmd_grid(args: argparse.Namespace, run: _Run) -> None:
    grid = das_dennis_grid(args.H)
    run.config = {"H": args.H, "emit": args.emit}
    if args.emit == "points":
        for row in grid:
            print(",".join(fmt(v) for v in row))
        path = run.output()
        if path:
            if args.format == "json":
                write_json(path, grid.tolist())
            else:
                write_points(path, grid)
        return
    values = {
        "H": args.H,
        "hv": hypervolume(grid).value,
        "mag_closed_form": das_dennis_closed_form_mag(args.H),
        "mag_computed": magnitude_projection(grid).value,
    }
    print(json.dumps(rounded(values)))
    if args.verify:
        _check_close("hv", values["hv"], das_dennis_closed_form_hv(args.H))
        _check_close("mag", values["mag_computed"], values["mag_closed_form"])
        if grid.shape[0] <= MAX_INCL_EXCL_POINTS:
            _check_close("mag", values["mag_computed"], mag_incl_excl(grid).value)
        print("verify: ok")
    path = run.output()
    if path:
        if args.format == "json":
            write_json(path, values)
        else:
            write_rows(path, list(values), [list(values.values())])


# ---------------------------------------------------------------------------
# stationarity


def cmd_stationarity(args: argparse.Namespace, run: _Run) -> None:
    point, direction = grid_point(args.H, args.point)
    if args.direction is not None:
        direction = np.asarray(args.direction, dtype=float)
    result = stationarity_probe(args.H, point, direction, args.eps, args.order)
    run.config = {
        "H": args.H,
        "point": args.point,
        "direction": direction.tolist(),
        "eps": list(args.eps),
        "order": args.order,
    }
    report = {
        "H": result.H,
        "point": list(result.point),
        "direction": list(result.direction),
        "fitted_order": result.fitted_order,
        "fitted_coeff": result.fitted_coeff,
        "slope": result.slope,
        "records": result.to_records(),
    }
    print(json.dumps(rounded(report), indent=2))
    if args.verify:
        grid = das_dennis_grid(args.H)
        _check_close("mag", magnitude_projection(grid).value, mag_incl_excl(grid).value)
        print("verify: ok")
    path = run.output()
    if path:
        records = result.to_records()
        if args.format == "json":
            write_json(path, records)
        else:
            header = ["H", "eps", "delta_mag", "fitted_order", "fitted_coeff"]
            write_rows(path, header, [[r[k] for k in header] for r in records])


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file; a manifest is written to <out>.manifest.json")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--verify", action="store_true", help="cross-check against the inclusion-exclusion oracle")

    parser = argparse.ArgumentParser(
        prog="magnitude-indicator",
        description="Magnitude and hypervolume indicators of anchored dominated sets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("indicator", parents=[common], help="evaluate an indicator on a point file")
    p.add_argument("points", help="CSV point file")
    p.add_argument("--anchor", type=_floats, help="comma-separated anchor (default: origin); write --anchor=-3,0 for negatives")
    p.add_argument("--indicator", choices=("hv", "mag"), default="mag")
    p.add_argument(
        "--method",
        choices=("auto", "sweep", "inclusion_exclusion", "projection", "closed_form"),
        default="auto",
    )
    p.add_argument("--decompose", action="store_true", help="also print the V_k decomposition as JSON")
    p.set_defaults(func=cmd_indicator)

    p = sub.add_parser("ascent", parents=[common], help="run projected set-gradient ascent")
    p.add_argument("--problem", choices=sorted(PROBLEM_DEFAULTS), required=True)
    p.add_argument("--mu", type=int)
    p.add_argument("--indicator", choices=("hv", "mag"))
    p.add_argument("--schedule", choices=("geometric", "backtracking"))
    p.add_argument("--iters", type=int)
    p.add_argument("--step", type=float, help="initial step size")
    p.add_argument("--decay", type=float, help="geometric decay factor")
    p.add_argument("--shrink", type=float, help="backtracking shrink factor")
    p.add_argument("--max-halvings", type=int)
    p.add_argument("--record-every", type=int)
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--inactive", choices=("layered", "freeze"))
    p.add_argument("--init", help="paper (fixed reference start, parabola only) | random | das-dennis:H[:no-centroid]")
    p.add_argument("--config", help="JSON file with AscentConfig fields (and optionally init)")
    p.set_defaults(func=cmd_ascent)

    p = sub.add_parser("grid", parents=[common], help="Das-Dennis grid points or indicator values")
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--emit", choices=("points", "values"), default="values")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("stationarity", parents=[common], help="perturbation probe on a grid point")
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--point", default="centroid", help="centroid | edge:i,j,k | vertex:i")
    p.add_argument("--direction", type=_floats, help="tangent direction (default depends on --point)")
    p.add_argument("--eps", type=_floats, default=[1e-3, 1e-2, 5e-2])
    p.add_argument("--order", type=int, choices=(1, 2), help="force the fitted order")
    p.set_defaults(func=cmd_stationarity)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    run = _Run(args, argv)
    try:
        args.func(args, run)
    except VerificationError as exc:
        print(f"verify failed: {exc}", file=sys.stderr)
        return 1
    except (MagnitudeError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    run.finish()
    return 0


if __name__ == "__main__":
    sys.exit(main())
