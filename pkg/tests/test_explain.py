import numpy as np
import pytest

from conftest import random_ensemble
from gridxai.errors import CapacityError, InvalidInputError, ModelIntegrityError
from gridxai.explain import (
    brute_force_interactions,
    brute_force_shap,
    dependence_data,
    feature_importance,
    interaction_values,
    tree_shap,
)
from gridxai.model import Ensemble, Hyperparameters, fit, make_stump


def test_base_only_model_all_zero():
    m = Ensemble(feature_names=["a", "b"], base_score=5.0, learning_rate=1.0, trees=[])
    s = tree_shap(m, np.array([[1.0, -2.0], [0.0, 0.0]]))
    assert s.base_value == 5.0
    np.testing.assert_array_equal(s.values, 0.0)


def test_stump_even_covers_splits_evenly():
    # leaves 0/10 with 50/50 covers: E[f] = 5, so x0 past the threshold gets +5
    stump = make_stump(0, 0.5, 0.0, 10.0, 50.0, 50.0)
    m = Ensemble(feature_names=["x0", "x1"], base_score=0.0, learning_rate=1.0, trees=[stump])
    x = np.array([1.0, 3.3])
    s = tree_shap(m, x[None, :])
    assert s.base_value == pytest.approx(5.0, abs=0)
    np.testing.assert_allclose(s.values[0], [5.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(brute_force_shap(m, x), [5.0, 0.0], atol=1e-12)


def test_fast_path_matches_oracle_on_random_models(rng):
    for _ in range(25):
        n_feat = int(rng.integers(1, 7))
        m = random_ensemble(rng, n_feat, max_depth=3, n_trees=int(rng.integers(1, 5)))
        X = rng.normal(size=(20, n_feat))
        X[rng.random(X.shape) < 0.15] = np.nan
        s = tree_shap(m, X)
        for i in range(X.shape[0]):
            oracle = brute_force_shap(m, X[i])
            np.testing.assert_allclose(s.values[i], oracle, atol=1e-9, rtol=0)


def test_oracle_axioms(rng):
    # dummy: an unsplit feature gets exactly zero
    stump = make_stump(0, 0.0, -3.0, 3.0, 10.0, 30.0)
    m = Ensemble(feature_names=["used", "dummy"], base_score=1.0, learning_rate=1.0,
                 trees=[stump])
    phi = brute_force_shap(m, np.array([0.5, 99.0]))
    assert phi[1] == 0.0

    # symmetry: identical stumps on two features, equal inputs -> equal phi
    t0 = make_stump(0, 0.0, -1.0, 2.0, 20.0, 20.0)
    t1 = make_stump(1, 0.0, -1.0, 2.0, 20.0, 20.0)
    m = Ensemble(feature_names=["a", "b"], base_score=0.0, learning_rate=1.0, trees=[t0, t1])
    phi = brute_force_shap(m, np.array([0.7, 0.7]))
    assert phi[0] == pytest.approx(phi[1], abs=1e-12)

    # efficiency: contributions sum to f(x) - E[f]
    for _ in range(10):
        n_feat = int(rng.integers(1, 6))
        m = random_ensemble(rng, n_feat)
        x = rng.normal(size=n_feat)
        phi = brute_force_shap(m, x)
        f_x = m.predict(x[None, :])[0]
        assert phi.sum() == pytest.approx(f_x - m.expected_value(), abs=1e-9)


def test_unused_feature_exactly_zero_in_fast_path(rng):
    m = random_ensemble(rng, 3)
    m.feature_names.append("never_split")
    X = rng.normal(size=(10, 4))
    s = tree_shap(m, X)
    np.testing.assert_array_equal(s.values[:, 3], 0.0)


def test_local_accuracy_on_trained_model(rng):
    X = rng.normal(size=(400, 5))
    y = 30 * X[:, 0] + rng.normal(size=400) * 10
    X[rng.random(X.shape) < 0.1] = np.nan
    m = fit(X, y, Hyperparameters(n_trees=40, max_depth=4, min_child_cover=2.0))
    s = tree_shap(m, X[:100])
    np.testing.assert_allclose(s.prediction(), m.predict(X[:100]), atol=1e-9, rtol=0)


def test_zero_cover_internal_node_rejected():
    stump = make_stump(0, 0.0, 1.0, 2.0, 0.0, 0.0)
    m = Ensemble(feature_names=["a"], base_score=0.0, learning_rate=1.0, trees=[stump])
    with pytest.raises(ModelIntegrityError):
        tree_shap(m, np.zeros((1, 1)))


def test_oracle_capacity_limit(rng):
    m = random_ensemble(rng, 16)
    with pytest.raises(CapacityError):
        brute_force_shap(m, np.zeros(16))


def test_importance_normalization(rng):
    stump = make_stump(0, 0.0, -2.0, 2.0, 10.0, 10.0)
    m = Ensemble(feature_names=["only"], base_score=0.0, learning_rate=1.0, trees=[stump])
    s = tree_shap(m, rng.normal(size=(30, 1)))
    fi = feature_importance(s)
    assert fi.values[0] == 1.0 and not fi.degenerate
    assert fi.normalizer > 0

    m2 = random_ensemble(rng, 3)
    m2.feature_names.append("unused")
    s2 = tree_shap(m2, rng.normal(size=(25, 4)))
    fi2 = feature_importance(s2)
    assert fi2.values.max() == 1.0
    assert fi2.values[3] == 0.0
    assert np.all((fi2.values >= 0) & (fi2.values <= 1))


def test_importance_degenerate_and_scale_free(rng):
    m = Ensemble(feature_names=["a", "b"], base_score=2.0, learning_rate=1.0, trees=[])
    s = tree_shap(m, rng.normal(size=(5, 2)))
    fi = feature_importance(s)
    assert fi.degenerate and fi.normalizer == 0.0
    np.testing.assert_array_equal(fi.values, 0.0)

    m2 = random_ensemble(rng, 4)
    s2 = tree_shap(m2, rng.normal(size=(40, 4)))
    fi_a = feature_importance(s2)
    s2.values = s2.values * 17.5
    fi_b = feature_importance(s2)
    np.testing.assert_allclose(fi_a.values, fi_b.values, atol=1e-12)


def test_interactions_additive_model_no_cross_terms():
    t0 = make_stump(0, 0.0, -1.0, 1.0, 30.0, 70.0)
    t1 = make_stump(1, 0.5, 2.0, -2.0, 40.0, 60.0)
    m = Ensemble(feature_names=["a", "b"], base_score=1.0, learning_rate=1.0, trees=[t0, t1])
    X = np.array([[0.3, -0.2], [-1.0, 1.0], [2.0, 2.0]])
    ir = interaction_values(m, X)
    np.testing.assert_allclose(ir.values[:, 0, 1], 0.0, atol=1e-9)
    np.testing.assert_allclose(ir.values[:, 1, 0], 0.0, atol=1e-9)


def test_interaction_row_sums_and_symmetry(rng):
    for _ in range(8):
        n_feat = int(rng.integers(2, 6))
        m = random_ensemble(rng, n_feat, max_depth=3, n_trees=3)
        X = rng.normal(size=(6, n_feat))
        ir = interaction_values(m, X)
        s = tree_shap(m, X)
        np.testing.assert_allclose(ir.attribution_sums(), s.values, atol=1e-8, rtol=0)
        np.testing.assert_array_equal(ir.values, np.transpose(ir.values, (0, 2, 1)))


def test_xor_pattern_has_nonzero_interaction(rng):
    # two stacked splits approximating x0 XOR x1: pure interaction, no main effects
    from gridxai.model.trees import _TreeBuilder

    b = _TreeBuilder()
    root = b.add_node(40.0)
    l = b.add_node(20.0)
    r = b.add_node(20.0)
    b.set_split(root, 0, 0.5, l, r, True)
    ll = b.add_node(10.0)
    lr = b.add_node(10.0)
    b.set_split(l, 1, 0.5, ll, lr, True)
    rl = b.add_node(10.0)
    rr = b.add_node(10.0)
    b.set_split(r, 1, 0.5, rl, rr, True)
    b.set_leaf(ll, 0.0)
    b.set_leaf(lr, 1.0)
    b.set_leaf(rl, 1.0)
    b.set_leaf(rr, 0.0)
    m = Ensemble(feature_names=["a", "b"], base_score=0.0, learning_rate=1.0,
                 trees=[b.finish()])
    x = np.array([0.0, 1.0])
    ir = interaction_values(m, x[None, :])
    oracle = brute_force_interactions(m, x)
    np.testing.assert_allclose(ir.values[0], oracle, atol=1e-9, rtol=0)
    assert abs(ir.values[0, 0, 1]) > 0.05
    assert ir.values[0, 0, 1] == ir.values[0, 1, 0]


def test_interactions_match_bruteforce_on_random_models(rng):
    for _ in range(6):
        n_feat = int(rng.integers(2, 5))
        m = random_ensemble(rng, n_feat, max_depth=3, n_trees=3)
        X = rng.normal(size=(3, n_feat))
        ir = interaction_values(m, X)
        for i in range(X.shape[0]):
            np.testing.assert_allclose(
                ir.values[i], brute_force_interactions(m, X[i]), atol=1e-9, rtol=0
            )


def test_dependence_monotone_single_feature(rng):
    stump = make_stump(0, 0.0, -4.0, 4.0, 10.0, 10.0)
    m = Ensemble(feature_names=["x"], base_score=0.0, learning_rate=1.0, trees=[stump])
    X = np.linspace(-2, 2, 50)[:, None]
    s = tree_shap(m, X)
    dep = dependence_data(s, X, "x", color_feature=None)
    assert len(dep.table) == 50
    order = np.argsort(dep.table["feature_value"].to_numpy())
    phi_sorted = dep.table["shap_value"].to_numpy()[order]
    assert np.all(np.diff(phi_sorted) >= 0)


def test_dependence_recovers_hinge_shape_on_synthetic_study():
    # generator: hydro contributes only below the 1.2 GW knee, flat above
    from gridxai.synthetic import HYDRO_KNEE, synthetic_study
    from gridxai.model import fit as fit_model

    ds = synthetic_study(n_days=150, seed=3)
    m = fit_model(ds.features(), ds.volume,
                  Hyperparameters(n_trees=200, max_depth=5, learning_rate=0.08))
    X = ds.features().iloc[::4]  # spread samples across the seasonal hydro range
    s = tree_shap(m, X)
    dep = dependence_data(s, X, "hydro_south", color_feature=None)
    x = dep.table["feature_value"].to_numpy()
    phi = dep.table["shap_value"].to_numpy()
    low, high = x < HYDRO_KNEE - 200, x > HYDRO_KNEE + 200
    assert low.sum() > 30 and high.sum() > 30
    below = np.corrcoef(x[low], phi[low])[0, 1]
    assert below < -0.8                       # steep decrease below the knee
    spread_above = phi[high].std()
    spread_below = phi[low].std()
    assert spread_above < 0.25 * spread_below  # saturation past the knee


def test_dependence_auto_color_picks_strongest_interactor(rng):
    gen = np.random.default_rng(0)
    X = gen.normal(size=(600, 3))
    y = X[:, 0] * X[:, 1] * 5.0 + 0.1 * X[:, 2]
    m = fit(X, y, Hyperparameters(n_trees=30, max_depth=3, min_child_cover=2.0))
    s = tree_shap(m, X[:80])
    dep = dependence_data(s, X[:80], "f0", color_feature="auto", model=m)
    assert dep.color_feature == "f1"
    assert set(dep.table.columns) == {"feature_value", "shap_value", "color_value"}
    with pytest.raises(InvalidInputError):
        dependence_data(s, X[:80], "nope")
    with pytest.raises(InvalidInputError):
        dependence_data(s, X[:80], "f0", color_feature="auto")
