import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from magnitude_indicator.errors import (
    AnchorAbovePoint,
    DimensionMismatch,
    NegativeLength,
    SingularSimilarityMatrix,
    TooManyPoints,
)
from magnitude_indicator.geometry import das_dennis_grid
from magnitude_indicator.indicators import (
    box_magnitude,
    box_magnitude_terms,
    finite_space_magnitude,
    hv_2d,
    hv_3d,
    hv_incl_excl,
    hypervolume,
    mag_incl_excl,
    magnitude,
    magnitude_projection,
    planar_zero_anchored_magnitude,
    projected_hypervolumes,
    shadow_decomposition,
)
from magnitude_indicator.problems import HV_ORBIT_TRIPLE, orbit_points

from conftest import brute_hv, brute_mag, cell_hv, point_sets


class TestSweeps:
    def test_example1_area(self, example1):
        assert hv_2d(example1).value == 9.0

    def test_single_rectangle(self):
        assert hv_2d([(2, 3)]).value == 6.0

    def test_hv2d_random_vs_oracle(self, rng):
        pts = rng.random((6, 2))
        assert abs(hv_2d(pts).value - hv_incl_excl(pts).value) <= 1e-12

    def test_hv3d_two_boxes(self):
        assert hv_3d([(0.5, 1, 1), (1, 0.5, 1)]).value == pytest.approx(0.75, abs=1e-15)

    def test_hv3d_centroid_cube(self):
        assert hv_3d([(1 / 3, 1 / 3, 1 / 3)]).value == pytest.approx(1 / 27, abs=1e-15)

    def test_hv3d_random_vs_oracle(self, rng):
        pts = rng.random((7, 3))
        assert abs(hv_3d(pts).value - hv_incl_excl(pts).value) <= 1e-12

    def test_dimension_errors(self):
        with pytest.raises(DimensionMismatch):
            hv_2d([(1, 2, 3)])
        with pytest.raises(DimensionMismatch):
            hv_3d([(1, 2)])

    def test_negative_input_rejected(self):
        with pytest.raises(AnchorAbovePoint):
            hv_2d([(-1, 2)])

    def test_empty(self):
        assert hypervolume(np.zeros((0, 3))).value == 0.0
        assert magnitude_projection(np.zeros((0, 2))).value == 0.0

    @given(point_sets(max_n=8))
    def test_sweep_matches_cell_counting(self, pts):
        assert abs(hypervolume(pts).value - cell_hv(pts)) <= 1e-12

    def test_duplicates_and_boundary_points(self):
        pts = [(1, 1, 0), (1, 1, 0), (0, 0, 0), (1, 0, 1)]
        assert hv_3d(pts).value == 0.0
        assert hv_incl_excl(pts).value == 0.0


class TestInclusionExclusion:
    def test_single_point(self):
        assert hv_incl_excl([(2, 3, 5)]).value == 30.0

    def test_grid_three(self):
        assert hv_incl_excl(das_dennis_grid(3)).value == pytest.approx(1 / 27, abs=1e-15)

    def test_nine_point_hv_population(self):
        pts = np.vstack((np.eye(3), orbit_points(*HV_ORBIT_TRIPLE)))
        assert hv_incl_excl(pts).value == pytest.approx(0.0752901021, abs=1e-8)

    def test_box_magnitude_oracle(self):
        assert mag_incl_excl([(2, 2, 2)]).value == 8.0

    def test_mag_grid_two(self):
        assert mag_incl_excl(das_dennis_grid(2)).value == pytest.approx(2.6875, abs=1e-12)

    def test_mag_grid_three(self):
        assert mag_incl_excl(das_dennis_grid(3)).value == pytest.approx(2.7546296296, abs=1e-9)

    def test_cap(self):
        with pytest.raises(TooManyPoints):
            hv_incl_excl(np.random.default_rng(0).random((26, 2)))

    def test_at_cap_large_block(self):
        # 20 points exercises the multi-block enumeration
        pts = np.random.default_rng(1).random((20, 2))
        assert abs(hv_incl_excl(pts).value - hv_2d(pts).value) <= 1e-10

    @given(point_sets(max_n=7, dims=(2, 3, 4)))
    def test_matches_itertools_oracle(self, pts):
        assert abs(hv_incl_excl(pts).value - brute_hv(pts)) <= 1e-11
        assert abs(mag_incl_excl(pts).value - brute_mag(pts)) <= 1e-10


class TestMagnitude:
    def test_example1(self, example1):
        assert magnitude_projection(example1).value == 7.25
        assert magnitude(example1, "inclusion_exclusion").value == pytest.approx(7.25, abs=1e-12)
        assert magnitude(example1, "closed_form").value == 7.25

    def test_orbit_boundary_optimum(self):
        assert magnitude_projection(orbit_points(7 / 9, 2 / 9, 0)).value == pytest.approx(43 / 18, abs=1e-12)

    def test_grid_four(self):
        assert magnitude_projection(das_dennis_grid(4)).value == pytest.approx(2.7890625, abs=1e-12)

    @given(point_sets(max_n=8))
    def test_projection_matches_oracle(self, pts):
        assert abs(magnitude_projection(pts).value - mag_incl_excl(pts).value) <= 1e-10

    @given(point_sets(max_n=6, dims=(4,)))
    def test_projection_matches_oracle_4d(self, pts):
        assert abs(magnitude_projection(pts).value - mag_incl_excl(pts).value) <= 1e-10

    def test_at_least_one(self, rng):
        assert magnitude_projection(rng.random((5, 3))).value >= 1

    def test_unknown_method(self, example1):
        with pytest.raises(ValueError):
            magnitude(example1, "bogus")
        with pytest.raises(ValueError):
            hypervolume(example1, "projection")

    def test_projected_hypervolumes_order(self, example1):
        subsets = [s for s, _ in projected_hypervolumes(example1)]
        assert subsets == [(0,), (1,), (0, 1)]


class TestBoxAndPlanar:
    @pytest.mark.parametrize(
        "lengths, expected", [([4], 3.0), ([2, 2], 4.0), ([1, 2, 3], 7.5), ([], 1.0)]
    )
    def test_box(self, lengths, expected):
        assert box_magnitude(lengths).value == pytest.approx(expected, abs=1e-15)

    def test_negative_length(self):
        with pytest.raises(NegativeLength):
            box_magnitude([1, -1])

    def test_terms_sum_to_value(self):
        terms = box_magnitude_terms([1, 2, 3])
        # e_k(1,2,3) = 1, 6, 11, 6
        assert terms == pytest.approx([1, 3, 11 / 4, 6 / 8])
        assert sum(terms) == pytest.approx(7.5)

    @given(
        st.lists(st.floats(0, 5, allow_subnormal=False), max_size=4),
        st.lists(st.floats(0, 5, allow_subnormal=False), max_size=4),
    )
    def test_product_law(self, L, M):
        joint = box_magnitude(L + M).value
        assert joint == pytest.approx(box_magnitude(L).value * box_magnitude(M).value, rel=1e-12)

    @given(st.lists(st.floats(0, 5, allow_subnormal=False), min_size=1, max_size=3))
    def test_box_matches_single_point_magnitude(self, L):
        assert magnitude_projection([L]).value == pytest.approx(box_magnitude(L).value, rel=1e-12)

    def test_planar_example(self, example1):
        assert planar_zero_anchored_magnitude(example1).value == 7.25

    def test_planar_rectangle(self):
        assert planar_zero_anchored_magnitude([(2, 4)]).value == 6.0 == box_magnitude([2, 4]).value

    def test_planar_dimension(self):
        with pytest.raises(DimensionMismatch):
            planar_zero_anchored_magnitude([(1, 2, 3)])

    def test_planar_agrees_with_projection(self, rng):
        for _ in range(20):
            pts = rng.random((rng.integers(1, 12), 2)) * 3
            a = planar_zero_anchored_magnitude(pts).value
            assert abs(a - magnitude_projection(pts).value) <= 1e-12


class TestShadowDecomposition:
    def test_grid_three(self):
        terms = shadow_decomposition(das_dennis_grid(3)).terms
        assert terms == pytest.approx((1, 3, 1, 1 / 27), abs=1e-14)

    def test_single_point(self):
        assert shadow_decomposition([(2, 5)]).terms == (1.0, 7.0, 10.0)

    def test_orbit_area(self):
        u, v, w = 0.5, 0.3, 0.2
        V2 = shadow_decomposition(orbit_points(u, v, w)).terms[2]
        assert V2 == pytest.approx(3 * (2 * u * v - v * v), abs=1e-14)

    def test_export(self, example1):
        out = shadow_decomposition(example1).to_dict()
        assert out == {"V": [1.0, 8.0, 9.0], "magnitude": 7.25, "hypervolume": 9.0}

    def test_dimension_cap(self):
        with pytest.raises(DimensionMismatch):
            shadow_decomposition([(1, 1, 1, 1)])

    @given(point_sets(max_n=8))
    def test_consistency(self, pts):
        dec = shadow_decomposition(pts)
        assert abs(dec.magnitude - magnitude_projection(pts).value) <= 1e-10
        assert dec.terms[0] == 1.0
        assert min(dec.terms) >= 0


class TestMonotonicity:
    @given(point_sets(max_n=6), st.data())
    def test_weak(self, pts, data):
        d = pts.shape[1]
        extra = np.array(data.draw(st.lists(st.floats(0, 1, allow_subnormal=False), min_size=d, max_size=d)))
        grown = np.vstack((pts, extra))
        assert magnitude_projection(grown).value >= magnitude_projection(pts).value - 1e-12

    def test_strict(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 4))
            pts = rng.random((int(rng.integers(1, 6)), d))
            extra = rng.random(d)
            if np.any(np.all(pts >= extra, axis=1)):
                continue
            grown = np.vstack((pts, extra))
            assert magnitude_projection(grown).value > magnitude_projection(pts).value

    def test_boundary_point_raises_magnitude_only(self):
        pts = np.array([(0.5, 0.5, 0.5)])
        grown = np.vstack((pts, (0.8, 0.2, 0.0)))
        assert hv_3d(grown).value == hv_3d(pts).value
        assert magnitude_projection(grown).value > magnitude_projection(pts).value


class TestFiniteSpace:
    def test_single_point(self):
        assert finite_space_magnitude([(1, 2)]).value == pytest.approx(1.0)

    def test_two_points(self):
        pts = [(0.0,), (math.log(3),)]
        assert finite_space_magnitude(pts).value == pytest.approx(1.5, abs=1e-12)

    def test_collinear_oracle(self, rng):
        # points of a line: Mag = 1 + sum tanh(gap / 2)
        x = np.sort(rng.random(12) * 5)
        expected = 1 + np.sum(np.tanh(np.diff(x) / 2))
        pts = np.column_stack((x, np.zeros_like(x)))
        assert finite_space_magnitude(pts).value == pytest.approx(expected, abs=1e-10)

    def test_interval_trend(self):
        values = [finite_space_magnitude(np.linspace(0, 4, n)[:, None]).value for n in (10, 50, 200)]
        assert values[0] < values[1] < values[2] < 3.0

    def test_duplicates(self):
        with pytest.raises(SingularSimilarityMatrix):
            finite_space_magnitude([(0, 0), (0, 0)])

    def test_metric(self):
        with pytest.raises(ValueError):
            finite_space_magnitude([(0, 0)], metric="l2")
