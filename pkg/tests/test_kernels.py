"""Cross-backend equivalence: the compiled kernels must reproduce the
pure-Python kernels bit for bit."""

import numpy as np
import pytest

from conftest import random_ensemble
from gridxai import _kernels
from gridxai._kernels import pure
from gridxai.model import Hyperparameters, fit, to_json

compiled = _kernels.compiled
needs_ext = pytest.mark.skipif(compiled is None, reason="Cython extension not built")


@needs_ext
def test_histograms_bit_identical(rng):
    codes = rng.integers(0, 11, size=(700, 5)).astype(np.uint16)
    slot = rng.integers(-1, 4, size=700).astype(np.int32)
    grad = rng.normal(size=700)
    a1, c1 = pure.node_histograms(codes, slot, grad, 4, 11)
    a2, c2 = compiled.node_histograms(codes, slot, grad, 4, 11)
    np.testing.assert_array_equal(a1, a2)
    np.testing.assert_array_equal(c1, c2)


@needs_ext
def test_predict_bit_identical(rng):
    m = random_ensemble(rng, 4, max_depth=4, n_trees=3)
    X = rng.normal(size=(200, 4))
    X[rng.random(X.shape) < 0.2] = np.nan
    for t in m.trees:
        p1 = pure.predict_tree(t.split_feature, t.threshold, t.left, t.right,
                               t.default_left, t.leaf_value, X)
        p2 = compiled.predict_tree(t.split_feature, t.threshold, t.left, t.right,
                                   t.default_left, t.leaf_value, X)
        np.testing.assert_array_equal(p1, p2)


@needs_ext
@pytest.mark.parametrize("condition,condition_feature", [(0, -1), (1, 2), (-1, 2), (1, 0), (-1, 0)])
def test_tree_shap_bit_identical(rng, condition, condition_feature):
    m = random_ensemble(rng, 4, max_depth=4, n_trees=4)
    X = rng.normal(size=(30, 4))
    X[rng.random(X.shape) < 0.15] = np.nan
    phi1 = np.zeros((30, 4))
    phi2 = np.zeros((30, 4))
    for t in m.trees:
        args = (t.split_feature, t.threshold, t.left, t.right,
                t.default_left, t.leaf_value, t.cover, t.depth())
        pure.tree_shap_batch(*args, X, phi1, condition, condition_feature)
        compiled.tree_shap_batch(*args, X, phi2, condition, condition_feature)
    np.testing.assert_array_equal(phi1, phi2)


@needs_ext
def test_trained_ensembles_identical_across_backends(rng, monkeypatch):
    X = rng.normal(size=(300, 4))
    y = rng.normal(size=300) * 20
    hp = Hyperparameters(n_trees=15, max_depth=5, subsample_rows=0.8,
                         min_child_cover=2.0, seed=3)

    def fit_with(backend):
        monkeypatch.setattr(_kernels, "node_histograms", backend.node_histograms)
        monkeypatch.setattr(_kernels, "predict_tree", backend.predict_tree)
        return to_json(fit(X, y, hp))

    assert fit_with(pure) == fit_with(compiled)
