import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from magnitude_indicator.errors import (
    AnchorAbovePoint,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidLevel,
)
from magnitude_indicator.geometry import (
    as_points,
    coordinate_subsets,
    das_dennis_grid,
    nondominated_filter,
    nondominated_layers,
    project,
    translate_to_anchor,
)
from magnitude_indicator.indicators import hypervolume, hv_incl_excl

from conftest import cell_hv, point_sets


class TestTranslate:
    def test_zero_anchor_is_identity(self, example1):
        assert np.array_equal(translate_to_anchor(example1, (0, 0)), example1)

    def test_shift(self):
        out = translate_to_anchor([(-2.3, 0.97)], (-3, 0))
        np.testing.assert_allclose(out, [[0.7, 0.97]], atol=1e-15)

    def test_anchor_above_point(self):
        with pytest.raises(AnchorAbovePoint):
            translate_to_anchor([(0, 0)], (1, 1))

    def test_points_on_anchor_plane_allowed(self):
        out = translate_to_anchor([(1, 0), (0, 0)], (0, 0))
        assert out.min() == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            translate_to_anchor([(1, 2)], (0, 0, 0))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            as_points([(1.0, np.nan)])


class TestNondominatedFilter:
    def test_mutually_nondominated(self, example1):
        assert nondominated_filter(example1).tolist() == example1.tolist()

    def test_strict_dominance(self):
        assert nondominated_filter([(1, 1), (2, 2)]).tolist() == [[2, 2]]

    def test_duplicates_collapse(self):
        assert nondominated_filter([(1, 2), (1, 2), (2, 1)]).tolist() == [[1, 2], [2, 1]]

    def test_near_duplicates_within_tolerance(self):
        out = nondominated_filter([(1, 2), (1 + 1e-13, 2), (2, 1)])
        assert out.shape == (2, 2)

    def test_weak_dominance_removes(self):
        assert nondominated_filter([(1, 2), (1, 3)]).tolist() == [[1, 3]]

    def test_empty(self):
        assert nondominated_filter(np.zeros((0, 3))).shape == (0, 3)

    def test_lexicographic_output(self):
        out = nondominated_filter([(5, 1), (1, 3), (3, 2)])
        assert out.tolist() == [[1, 3], [3, 2], [5, 1]]

    @given(point_sets(max_n=10, dims=(2, 3, 4)))
    def test_idempotent(self, pts):
        once = nondominated_filter(pts)
        assert np.array_equal(nondominated_filter(once), once)

    @given(point_sets(max_n=8, dims=(2, 3)))
    def test_filter_preserves_union(self, pts):
        assert abs(hypervolume(nondominated_filter(pts)).value - hypervolume(pts).value) <= 1e-12

    @given(point_sets(max_n=8))
    def test_no_survivor_dominated(self, pts):
        out = nondominated_filter(pts)
        for i, p in enumerate(out):
            for j, q in enumerate(out):
                if i != j:
                    assert not (np.all(q >= p) and np.any(q > p))


class TestLayers:
    def test_layers_partition(self):
        pts = [(1, 1), (2, 2), (3, 0.5), (0.5, 0.5), (2, 2)]
        layers = nondominated_layers(pts)
        assert sorted(np.concatenate(layers).tolist()) == list(range(5))
        assert sorted(layers[0].tolist()) == [1, 2]

    @given(point_sets(max_n=10))
    def test_each_layer_nondominated(self, pts):
        for layer in nondominated_layers(pts):
            assert nondominated_filter(pts[layer]).shape[0] == layer.size


class TestProject:
    def test_single_coordinate(self):
        assert project([(1, 3), (3, 2)], [0]).tolist() == [[1], [3]]

    def test_pair(self):
        out = project([(0.5, 1, 1), (1, 0.5, 1)], [0, 1])
        assert out.tolist() == [[0.5, 1], [1, 0.5]]

    def test_full_subset_is_identity(self, example1):
        assert np.array_equal(project(example1, [0, 1]), example1)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            project([(1, 2)], [2])

    def test_not_increasing(self):
        with pytest.raises(IndexOutOfRange):
            project([(1, 2, 3)], [1, 0])

    def test_subset_order(self):
        assert list(coordinate_subsets(3)) == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]

    @given(point_sets(max_n=6, dims=(2, 3, 4)), st.data())
    def test_projection_commutes_with_union(self, pts, data):
        # cell counting on the projected points against inclusion-exclusion
        subset = data.draw(st.sampled_from(list(coordinate_subsets(pts.shape[1]))))
        proj = project(pts, subset)
        assert abs(hv_incl_excl(proj).value - cell_hv(proj)) <= 1e-12


class TestDasDennis:
    def test_level_one(self):
        assert das_dennis_grid(1).tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]

    def test_level_three_has_centroid(self):
        g = das_dennis_grid(3)
        assert g.shape == (10, 3)
        assert np.any(np.all(np.isclose(g, 1 / 3, atol=1e-15), axis=1))

    def test_level_two_has_edge_midpoint(self):
        g = das_dennis_grid(2)
        assert g.shape == (6, 3)
        assert [0.5, 0.5, 0.0] in g.tolist()

    @pytest.mark.parametrize("H", range(1, 13))
    def test_cardinality_and_sum(self, H):
        g = das_dennis_grid(H)
        assert g.shape[0] == (H + 1) * (H + 2) // 2
        assert np.all(np.abs(g.sum(axis=1) - 1) <= 1e-12)
        assert np.unique(g, axis=0).shape[0] == g.shape[0]

    @pytest.mark.parametrize("H", [0, -1, 2.5])
    def test_invalid_level(self, H):
        with pytest.raises(InvalidLevel):
            das_dennis_grid(H)
