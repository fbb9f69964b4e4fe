import json

import numpy as np
import pandas as pd
import pytest

from gridxai import _kernels
from gridxai.errors import InvalidInputError, SchemaMismatchError
from gridxai.model import (
    Ensemble,
    Hyperparameters,
    fit,
    from_json,
    make_stump,
    to_json,
)

SMALL = Hyperparameters(n_trees=1, max_depth=1, learning_rate=1.0,
                        l2_leaf_penalty=0.0, min_child_cover=1.0)


def test_constant_target_predicts_mean():
    X = np.ones((3, 1))
    m = fit(X, [3.0, 3.0, 3.0], Hyperparameters(n_trees=5, min_child_cover=1.0))
    assert len(m.trees) == 0
    assert np.all(m.predict(X) == 3.0)


def test_separable_step_yields_exact_stump():
    X = np.array([[0.0], [1.0], [0.0], [1.0]])
    m = fit(X, [0.0, 10.0, 0.0, 10.0], SMALL)
    assert len(m.trees) == 1
    t = m.trees[0]
    assert t.n_nodes == 3 and t.split_feature[0] == 0
    np.testing.assert_array_equal(np.sort(t.leaf_value[1:]), [-5.0, 5.0])
    np.testing.assert_array_equal(m.predict(np.array([[0.0], [1.0]])), [0.0, 10.0])


def test_synthetic_linear_recovery():
    # oracle: the data generator itself; R^2 against unseen draws
    gen = np.random.default_rng(42)
    X = gen.normal(size=(5000, 3))
    y = 2.0 * X[:, 0] + gen.normal(0.0, 0.1, size=5000)
    m = fit(X[:4000], y[:4000])
    pred = m.predict(X[4000:])
    y_te = y[4000:]
    r2 = 1.0 - np.sum((y_te - pred) ** 2) / np.sum((y_te - y_te.mean()) ** 2)
    assert r2 >= 0.95


def test_empty_input_rejected():
    with pytest.raises(InvalidInputError):
        fit(np.empty((0, 2)), [])
    with pytest.raises(InvalidInputError):
        fit(np.ones((1, 1)), [1.0])
    with pytest.raises(InvalidInputError):
        fit(np.ones((3, 1)), [1.0, np.nan, 2.0])


def test_missing_features_are_allowed_and_routed():
    # NaN rows carry their own signal; the learned default branch must pick it up
    gen = np.random.default_rng(3)
    n = 400
    X = gen.normal(size=(n, 1))
    y = np.where(X[:, 0] > 0, 5.0, -5.0)
    missing = gen.random(n) < 0.3
    X[missing, 0] = np.nan
    y[missing] = 5.0
    m = fit(X, y, Hyperparameters(n_trees=40, max_depth=2, learning_rate=0.5,
                                  min_child_cover=1.0))
    pred = m.predict(np.array([[np.nan]]))
    assert abs(pred[0] - 5.0) < 0.5


def test_prediction_constant_model():
    m = Ensemble(feature_names=["a"], base_score=5.0, learning_rate=1.0, trees=[])
    assert np.all(m.predict(np.zeros((4, 1))) == 5.0)


def test_fast_prediction_matches_naive_oracle(rng):
    X = rng.normal(size=(300, 4))
    X[rng.random(X.shape) < 0.1] = np.nan
    y = rng.normal(size=300) * 100.0
    m = fit(X, y, Hyperparameters(n_trees=30, max_depth=4, min_child_cover=2.0))
    fast = m.predict(X)
    naive = m.predict_naive(X)
    np.testing.assert_allclose(fast, naive, rtol=1e-9, atol=0)


def test_determinism_same_seed_identical_json(rng):
    X = rng.normal(size=(200, 3))
    y = rng.normal(size=200)
    hp = Hyperparameters(n_trees=15, subsample_rows=0.7, subsample_features=0.67, seed=9)
    assert to_json(fit(X, y, hp)) == to_json(fit(X, y, hp))


def test_cover_additivity_exact(rng):
    X = rng.normal(size=(500, 4))
    y = rng.normal(size=500) * 10
    m = fit(X, y, Hyperparameters(n_trees=10, max_depth=5, min_child_cover=1.0))
    for t in m.trees:
        t.validate()  # includes exact cover additivity
        assert t.cover[0] == 500.0


def test_training_loss_non_increasing(rng):
    X = rng.normal(size=(800, 3))
    y = 2 * X[:, 0] - X[:, 1] + rng.normal(size=800)
    m = fit(X, y, Hyperparameters(n_trees=60))
    pred = np.full(800, m.base_score)
    prev = np.mean((pred - y) ** 2)
    for t in m.trees:
        pred += _kernels.predict_tree(t.split_feature, t.threshold, t.left, t.right,
                                      t.default_left, t.leaf_value, X)
        mse = np.mean((pred - y) ** 2)
        assert mse <= prev + 1e-12
        prev = mse


def test_dataframe_roundtrip_and_schema_errors(rng):
    X = pd.DataFrame({"a": rng.normal(size=50), "b": rng.normal(size=50)})
    y = X["a"].to_numpy() * 3
    m = fit(X, y, Hyperparameters(n_trees=5, min_child_cover=1.0))
    assert m.feature_names == ["a", "b"]
    m.predict(X[["b", "a"]])  # reordering by name is fine
    with pytest.raises(SchemaMismatchError):
        m.predict(X.rename(columns={"b": "zz"}))
    with pytest.raises(SchemaMismatchError):
        m.predict(X.assign(extra=1.0))
    with pytest.raises(SchemaMismatchError):
        m.predict(np.zeros((2, 3)))


def test_serialization_value_exact(rng):
    X = rng.normal(size=(150, 3))
    y = rng.normal(size=150) * 7
    m = fit(X, y, Hyperparameters(n_trees=8, max_depth=4, min_child_cover=1.0, seed=5))
    s = to_json(m)
    m2 = from_json(s)
    assert to_json(m2) == s
    for t1, t2 in zip(m.trees, m2.trees):
        np.testing.assert_array_equal(t1.threshold, t2.threshold)
        np.testing.assert_array_equal(t1.leaf_value, t2.leaf_value)
        np.testing.assert_array_equal(t1.cover, t2.cover)
    np.testing.assert_array_equal(m.predict(X), m2.predict(X))
    doc = json.loads(s)
    assert doc["format_version"] == "1"
    assert doc["feature_names"] == ["f0", "f1", "f2"]


def test_hyperparameter_validation_and_roundtrip():
    hp = Hyperparameters(n_trees=10, learning_rate=0.1)
    assert Hyperparameters.from_dict(hp.to_dict()) == hp
    for bad in (
        {"n_trees": 0},
        {"learning_rate": 0.0},
        {"learning_rate": 1.5},
        {"subsample_rows": 0.0},
        {"l2_leaf_penalty": -1.0},
        {"max_depth": 0},
        {"n_histogram_bins": 1},
    ):
        with pytest.raises(InvalidInputError):
            Hyperparameters(**bad).validate()


def test_stump_helper_predicts_both_sides():
    t = make_stump(0, 0.5, 0.0, 10.0, 50.0, 50.0)
    m = Ensemble(feature_names=["x0"], base_score=0.0, learning_rate=1.0, trees=[t])
    np.testing.assert_array_equal(m.predict(np.array([[0.0], [1.0]])), [0.0, 10.0])
