import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glprop.affinity import (
    column_normalize,
    gaussian_similarity,
    group_distance_report,
    jaccard_affinity,
    kernel_bandwidth,
    pairwise_sq_distances,
    row_normalize,
    similarity_matrix,
)
from glprop.errors import DegenerateBandwidth, ZeroRowSum
from glprop.model import FeatureMatrix, IncidenceRecord, UserCollection


class TestPairwiseSqDistances:
    def test_hand_value(self):
        d = pairwise_sq_distances([[0.0, 0.0], [3.0, 4.0]])
        assert d[0, 1] == pytest.approx(25.0, abs=1e-12)
        assert d[1, 0] == pytest.approx(25.0, abs=1e-12)

    def test_zero_diagonal_and_symmetry(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(7, 4))
        d = pairwise_sq_distances(x)
        np.testing.assert_array_equal(np.diag(d), 0.0)
        np.testing.assert_allclose(d, d.T, atol=0)
        assert (d >= 0).all()

    def test_row_permutation_permutes_both_axes(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(6, 3))
        perm = rng.permutation(6)
        d = pairwise_sq_distances(x)
        np.testing.assert_allclose(
            pairwise_sq_distances(x[perm]), d[np.ix_(perm, perm)], atol=1e-12
        )


class TestKernelBandwidth:
    def test_collinear_hand_value(self):
        # points 0, 1, 2 on a line: distances {1, 1, 2}, population variance 2/9
        x = np.array([[0.0], [1.0], [2.0]])
        assert kernel_bandwidth(x) == pytest.approx(2.0 / 9.0, abs=1e-15)

    def test_identical_points_degenerate(self):
        with pytest.raises(DegenerateBandwidth):
            kernel_bandwidth([[1.0, 2.0], [1.0, 2.0]])

    def test_single_image_degenerate(self):
        with pytest.raises(DegenerateBandwidth):
            kernel_bandwidth([[1.0, 2.0]])

    def test_permutation_invariant(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(8, 5))
        perm = rng.permutation(8)
        assert kernel_bandwidth(x) == pytest.approx(kernel_bandwidth(x[perm]), rel=1e-12)

    def test_scaling_feature_vectors_scales_delta_quadratically(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(6, 4))
        c = 3.0
        assert kernel_bandwidth(c * x) == pytest.approx(c * c * kernel_bandwidth(x), rel=1e-10)
        np.testing.assert_allclose(
            pairwise_sq_distances(c * x), c * c * pairwise_sq_distances(x), rtol=1e-10
        )
        # the kernel itself is therefore *not* scale invariant
        w1 = similarity_matrix(x)
        w2 = similarity_matrix(c * x)
        assert np.abs(w1 - w2).max() > 1e-6


class TestGaussianSimilarity:
    def test_identical_features_full_similarity(self):
        w = gaussian_similarity([[1.0, 1.0], [1.0, 1.0]], delta=0.7)
        assert w[0, 1] == pytest.approx(1.0)

    def test_kernel_values(self):
        delta = 1.3
        x = np.array([[0.0], [np.sqrt(2.0) * delta]])  # squared distance = 2 delta^2
        w = gaussian_similarity(x, delta)
        assert w[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-12)

        x = np.array([[0.0], [2.0]])  # squared distance 4, delta 1
        w = gaussian_similarity(x, 1.0)
        assert w[0, 1] == pytest.approx(np.exp(-2.0), rel=1e-12)

    def test_unit_diagonal_symmetric_bounded(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(9, 3))
        w = gaussian_similarity(x, kernel_bandwidth(x))
        np.testing.assert_array_equal(np.diag(w), 1.0)
        np.testing.assert_allclose(w, w.T, atol=0)
        assert ((w > 0) & (w <= 1)).all()

    def test_rejects_bad_delta(self):
        with pytest.raises(DegenerateBandwidth):
            gaussian_similarity([[0.0], [1.0]], delta=0.0)


class TestRowNormalize:
    def test_uniform(self):
        np.testing.assert_allclose(
            row_normalize([[1.0, 1.0], [1.0, 1.0]]), [[0.5, 0.5], [0.5, 0.5]]
        )

    def test_hand_value(self):
        w = row_normalize([[1.0, 0.2], [0.2, 1.0]])
        np.testing.assert_allclose(w[0], [1 / 1.2, 0.2 / 1.2], rtol=1e-12)

    def test_single_image(self):
        np.testing.assert_array_equal(row_normalize([[1.0]]), [[1.0]])
        np.testing.assert_array_equal(similarity_matrix([[3.0, 1.0]]), [[1.0]])

    def test_zero_row_sum(self):
        with pytest.raises(ZeroRowSum):
            row_normalize([[0.0, 0.0], [1.0, 1.0]])

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(5)
        w = row_normalize(rng.random((6, 6)) + 0.01)
        np.testing.assert_allclose(w.sum(axis=1), 1.0, atol=1e-12)


def brute_force_jaccard(owned_sets, k):
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            both = sum(1 for s in owned_sets if i in s and j in s)
            either = sum(1 for s in owned_sets if i in s or j in s)
            out[i, j] = both / either if either else 0.0
    return out


class TestJaccardAffinity:
    def test_two_user_hand_value(self):
        # u1 owns {A, B}, u2 owns {A}: J(A, B) = 1 / 2
        j = jaccard_affinity([{0, 1}, {0}], k=2)
        assert j[0, 1] == pytest.approx(0.5)
        assert j[0, 0] == 1.0 and j[1, 1] == 1.0

    def test_unowned_category_is_all_zero(self):
        j = jaccard_affinity([{0}], k=3)
        assert j[2].sum() == 0 and j[:, 2].sum() == 0

    def test_single_user_pair(self):
        j = jaccard_affinity([{0, 1}], k=2)
        assert j[0, 1] == 1.0

    def test_accepts_incidence_records(self):
        recs = [IncidenceRecord("u1", frozenset({0, 1})), IncidenceRecord("u2", frozenset({0}))]
        np.testing.assert_allclose(jaccard_affinity(recs, 2), jaccard_affinity([{0, 1}, {0}], 2))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sets(st.integers(0, 5)), min_size=0, max_size=10))
    def test_matches_set_counting_oracle(self, owned_sets):
        k = 6
        got = jaccard_affinity(owned_sets, k)
        expected = brute_force_jaccard(owned_sets, k)
        np.testing.assert_allclose(got, expected, atol=1e-12)
        np.testing.assert_allclose(got, got.T, atol=0)
        assert ((got >= 0) & (got <= 1)).all()

    def test_category_permutation_equivariance(self):
        rng = np.random.default_rng(6)
        sets = [set(rng.choice(6, size=rng.integers(1, 4), replace=False)) for _ in range(8)]
        perm = rng.permutation(6)
        relabeled = [{int(perm[c]) for c in s} for s in sets]
        j = jaccard_affinity(sets, 6)
        jp = jaccard_affinity(relabeled, 6)
        np.testing.assert_allclose(jp[np.ix_(perm, perm)], j, atol=1e-15)


class TestColumnNormalize:
    def test_hand_value(self):
        g = column_normalize([[1.0, 0.5], [0.5, 1.0]])
        np.testing.assert_allclose(g, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]], rtol=1e-12)

    def test_identity_fixed_point(self):
        np.testing.assert_array_equal(column_normalize(np.eye(3)), np.eye(3))

    def test_zero_column_becomes_identity_column(self):
        g = column_normalize([[1.0, 0.0], [1.0, 0.0]])
        np.testing.assert_allclose(g[:, 1], [0.0, 1.0])
        np.testing.assert_allclose(g.sum(axis=0), 1.0, atol=1e-12)

    def test_columns_sum_to_one(self):
        rng = np.random.default_rng(8)
        g = column_normalize(rng.random((5, 5)))
        np.testing.assert_allclose(g.sum(axis=0), 1.0, atol=1e-12)


class TestGroupDistanceReport:
    def _make(self, rows, assignments):
        ids = tuple(f"i{n}" for n in range(len(rows)))
        feats = FeatureMatrix(values=np.asarray(rows, dtype=float), image_ids=ids)
        board_of = {ids[n]: b for n, (b, _) in enumerate(assignments)}
        board_category = {b: c for b, c in assignments}
        user = UserCollection(
            user_id="u0", image_ids=ids, board_of=board_of, board_category=board_category
        )
        return feats, [user]

    def test_identical_images_zero_within_board(self):
        feats, users = self._make([[1.0, 1.0], [1.0, 1.0]], [("b0", 0), ("b0", 0)])
        report = group_distance_report(feats, users)
        assert report[0]["within_board"] == 0.0
        assert report[0]["within_category"] is None

    def test_clustered_boards_are_tighter_than_category(self):
        rng = np.random.default_rng(9)
        rows, assignments = [], []
        for b, center in enumerate((np.zeros(4), np.full(4, 5.0))):
            for _ in range(6):
                rows.append(center + rng.normal(size=4) * 0.05)
                assignments.append((f"b{b}", 0))
        feats, users = self._make(rows, assignments)
        report = group_distance_report(feats, users)
        assert report[0]["within_board"] < report[0]["within_category"]

    def test_single_board_reports_absent_cross_value(self):
        feats, users = self._make([[0.0], [1.0]], [("b0", 2), ("b0", 2)])
        report = group_distance_report(feats, users)
        assert report[2]["within_category"] is None
        assert report[2]["within_board"] == pytest.approx(1.0)
