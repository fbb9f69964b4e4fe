import numpy as np
import pytest

from gridxai.model import Ensemble
from gridxai.model.trees import _TreeBuilder


def random_tree(rng, n_features, max_depth, leaf_scale=10.0):
    """Random valid tree: integer leaf covers, additive internal covers."""
    b = _TreeBuilder()

    def grow(depth):
        node = b.add_node(0.0)
        if depth == max_depth or (depth > 0 and rng.random() < 0.3):
            b.set_leaf(node, float(rng.normal() * leaf_scale))
            b.cover[node] = float(rng.integers(1, 20))
            return node
        f = int(rng.integers(n_features))
        thr = float(np.round(rng.normal(), 3))
        l = grow(depth + 1)
        r = grow(depth + 1)
        b.set_split(node, f, thr, l, r, bool(rng.random() < 0.5))
        b.cover[node] = b.cover[l] + b.cover[r]
        return node

    grow(0)
    return b.finish()


def random_ensemble(rng, n_features, max_depth=3, n_trees=4, leaf_scale=10.0,
                    base_score=None):
    trees = [random_tree(rng, n_features, max_depth, leaf_scale) for _ in range(n_trees)]
    base = float(rng.normal() * leaf_scale) if base_score is None else base_score
    names = [f"f{j}" for j in range(n_features)]
    return Ensemble(feature_names=names, base_score=base, learning_rate=1.0, trees=trees)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
