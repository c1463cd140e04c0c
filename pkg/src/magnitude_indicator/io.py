"""Point-set CSV files and fixed-precision number formatting.

A point file has one point per line with ``d`` comma-separated decimal
fields; an optional header line starts with ``#``.
"""
from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .geometry import as_points

SIGNIFICANT_DIGITS = 12


def fmt(x: float) -> str:
    """Format a float with 12 significant digits (``repr`` style exponent)."""
    return f"{float(x):.{SIGNIFICANT_DIGITS}g}"


def round_sig(x: float) -> float:
    return float(fmt(x))


def rounded(obj: Any) -> Any:
    """Round every float inside a JSON-like structure to 12 significant digits."""
    if isinstance(obj, (float, np.floating)):
        return round_sig(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist())
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def read_points(path: str | Path) -> np.ndarray:
    """Load a point file into an ``(n, d)`` array.

    Raises:
        OSError: if the file cannot be read.
        ValueError: on malformed rows or ragged dimensions.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # empty files warn in loadtxt
        arr = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if arr.size == 0:
        raise ValueError(f"{path}: no points found")
    return as_points(arr)


def write_points(path: str | Path, points: ArrayLike, header: Sequence[str] | None = None) -> None:
    pts = as_points(points)
    with open(path, "w", newline="") as fh:
        if header is not None:
            fh.write("# " + ",".join(header) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows([[fmt(v) for v in row] for row in pts])


def write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Plain CSV table; floats are written with 12 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_json(path: str | Path, obj: Any) -> None:
    with open(path, "w") as fh:
        json.dump(rounded(obj), fh, indent=2)
        fh.write("\n")
