"""Shared oracles, strategies and the acceptance summary hook."""
from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


# ---------------------------------------------------------------------------
# independent oracles (plain itertools / coordinate compression)


def brute_hv(points) -> float:
    """Inclusion-exclusion over itertools.combinations."""
    pts = [tuple(map(float, p)) for p in points]
    total = 0.0
    for k in range(1, len(pts) + 1):
        for subset in itertools.combinations(pts, k):
            total += (-1) ** (k + 1) * math.prod(min(c) for c in zip(*subset))
    return total


def brute_mag(points) -> float:
    pts = [tuple(map(float, p)) for p in points]
    total = 0.0
    for k in range(1, len(pts) + 1):
        for subset in itertools.combinations(pts, k):
            total += (-1) ** (k + 1) * math.prod(1 + min(c) / 2 for c in zip(*subset))
    return total


def cell_hv(points) -> float:
    """Exact union volume by summing dominated cells of the coordinate grid."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0.0
    d = pts.shape[1]
    axes = [np.unique(np.concatenate(([0.0], pts[:, a]))) for a in range(d)]
    total = 0.0
    for cell in itertools.product(*[range(len(ax) - 1) for ax in axes]):
        upper = np.array([axes[a][cell[a] + 1] for a in range(d)])
        if np.any(np.all(pts >= upper, axis=1)):
            total += math.prod(axes[a][cell[a] + 1] - axes[a][cell[a]] for a in range(d))
    return total


# ---------------------------------------------------------------------------
# strategies

coord = st.one_of(
    st.floats(0, 1, allow_nan=False, allow_subnormal=False),
    st.integers(0, 8).map(lambda k: k / 8),  # exact ties
)


@st.composite
def point_sets(draw, min_n=1, max_n=8, dims=(2, 3)):
    d = draw(st.sampled_from(dims))
    n = draw(st.integers(min_n, max_n))
    rows = draw(st.lists(st.lists(coord, min_size=d, max_size=d), min_size=n, max_size=n))
    return np.array(rows, dtype=float).reshape(n, d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def example1():
    return np.array([(1.0, 3.0), (3.0, 2.0), (5.0, 1.0)])
