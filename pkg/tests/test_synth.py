import numpy as np
import pytest

from glprop.affinity import category_affinity, group_distance_report
from glprop.errors import InvalidConfig
from glprop.synth import SynthConfig, synth_generate


def small_config(**overrides):
    base = dict(
        seed=11,
        num_categories=6,
        num_users=8,
        boards_per_user=(2, 4),
        pins_per_board=(4, 8),
        feature_dim=6,
        incidence_users=40,
    )
    base.update(overrides)
    return SynthConfig(**base)


class TestSynthConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(InvalidConfig):
            small_config(num_categories=1)
        with pytest.raises(InvalidConfig):
            small_config(boards_per_user=(3, 2))
        with pytest.raises(InvalidConfig):
            small_config(pins_per_board=(0, 5))
        with pytest.raises(InvalidConfig):
            small_config(prediction_noise=-0.1)
        with pytest.raises(InvalidConfig):
            small_config(category_correlation=1.5)
        with pytest.raises(InvalidConfig):
            small_config(board_spread=0.0)


class TestDeterminism:
    def test_same_seed_bit_identical(self):
        a = synth_generate(small_config())
        b = synth_generate(small_config())
        assert np.array_equal(a.features.values, b.features.values)
        assert np.array_equal(a.initial_labels, b.initial_labels)
        assert a.features.image_ids == b.features.image_ids
        assert [u.user_id for u in a.users] == [u.user_id for u in b.users]
        assert [sorted(r.owned) for r in a.incidence] == [sorted(r.owned) for r in b.incidence]

    def test_different_seed_differs(self):
        a = synth_generate(small_config())
        b = synth_generate(small_config(seed=12))
        assert not np.array_equal(a.features.values, b.features.values)


class TestStructure:
    def test_shapes_and_cross_references(self):
        ds = synth_generate(small_config())
        assert ds.features.n == ds.initial_labels.shape[0]
        assert ds.initial_labels.shape[1] == ds.categories.k == 6
        per_user = sum(len(u.image_ids) for u in ds.users)
        assert per_user == ds.features.n
        for user in ds.users:
            assert set(user.board_of) == set(user.image_ids)
        assert len(ds.incidence) == 40

    def test_rows_are_distributions(self):
        ds = synth_generate(small_config(prediction_noise=0.9))
        np.testing.assert_allclose(ds.initial_labels.sum(axis=1), 1.0, atol=1e-12)
        assert (ds.initial_labels >= 0).all()

    def test_noiseless_predictions_are_one_hot(self):
        ds = synth_generate(small_config(prediction_noise=0.0))
        labels = ds.inherited_labels()
        for img, row in zip(ds.features.image_ids, ds.initial_labels):
            expected = np.zeros(6)
            expected[labels[img]] = 1.0
            np.testing.assert_array_equal(row, expected)

    def test_category_names_come_from_taxonomy(self):
        ds = synth_generate(small_config())
        assert ds.categories.names == ("Animals", "Architecture", "Art",
                                       "Cars & Motorcycles", "Celebrities", "Design")


class TestQualitativeGeometry:
    def test_boards_tighter_than_categories(self):
        ds = synth_generate(small_config(num_users=12, boards_per_user=(3, 5)))
        report = group_distance_report(ds.features, ds.users)
        comparable = {
            c: s for c, s in report.items()
            if s["within_board"] is not None and s["within_category"] is not None
        }
        assert comparable
        closer = sum(
            1 for s in comparable.values() if s["within_board"] < s["within_category"]
        )
        assert closer == len(comparable)

    def test_correlation_shows_up_in_affinity(self):
        # paired categories (2i, 2i+1) should be more affine than unpaired ones
        ds = synth_generate(
            small_config(num_categories=8, incidence_users=300, category_correlation=0.8)
        )
        g = category_affinity(ds.incidence, 8)
        paired, unpaired = [], []
        for i in range(8):
            for j in range(8):
                if i == j:
                    continue
                (paired if j == i ^ 1 else unpaired).append(g[i, j])
        assert np.mean(paired) > 2.0 * np.mean(unpaired)
