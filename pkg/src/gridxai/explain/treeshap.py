"""Exact SHAP attributions for boosted-tree ensembles.

Conditioning is path-dependent: descending a tree, the untaken side of a
split on a hidden feature is weighted by its share of the node cover, so
conditional expectations come from the training distribution embedded in
the model itself. The per-tree combination runs in polynomial time; the
exponential-subset oracle in ``oracle.py`` uses identical expectation
semantics, so the two agree to float round-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels as kernels
from ..errors import ModelIntegrityError
from ..model.booster import Ensemble, coerce_matrix


@dataclass
class ShapResult:
    base_value: float            # expected model output, target units
    values: np.ndarray           # [n_samples, n_features] attributions
    feature_names: list[str]

    @property
    def n_samples(self) -> int:
        return int(self.values.shape[0])

    def prediction(self) -> np.ndarray:
        """base_value + row sums; equals the model prediction (local accuracy)."""
        return self.base_value + self.values.sum(axis=1)


@dataclass
class InteractionResult:
    base_value: float
    values: np.ndarray           # [n_samples, n_features, n_features], symmetric
    feature_names: list[str]

    def attribution_sums(self) -> np.ndarray:
        """Row sums over one axis; reproduces the plain SHAP attributions."""
        return self.values.sum(axis=2)


def _check_covers(m: Ensemble) -> None:
    for k, t in enumerate(m.trees):
        internal = t.split_feature >= 0
        if np.any(t.cover[internal] <= 0):
            raise ModelIntegrityError(f"tree {k} has an internal node with zero cover")


def _accumulate(m: Ensemble, A: np.ndarray, condition: int, condition_feature: int) -> np.ndarray:
    phi = np.zeros((A.shape[0], m.n_features), dtype=np.float64)
    for t in m.trees:
        kernels.tree_shap_batch(
            t.split_feature, t.threshold, t.left, t.right,
            t.default_left, t.leaf_value, t.cover,
            t.depth(), A, phi, condition, condition_feature,
        )
    return phi


def tree_shap(m: Ensemble, X) -> ShapResult:
    """Exact per-sample attributions; base_value + sum(phi) = prediction."""
    _check_covers(m)
    A, _ = coerce_matrix(X, m.feature_names)
    phi = _accumulate(m, A, 0, -1)
    return ShapResult(
        base_value=m.expected_value(),
        values=phi,
        feature_names=list(m.feature_names),
    )


def interaction_values(m: Ensemble, X) -> InteractionResult:
    """Pairwise interaction matrices via present/absent conditioning.

    Off-diagonal entries split each pairwise effect evenly between (j,k)
    and (k,j); the diagonal holds main effects, fixed so that every row
    sums to the plain SHAP attribution of that feature.
    """
    _check_covers(m)
    A, _ = coerce_matrix(X, m.feature_names)
    n, nf = A.shape[0], m.n_features
    phi = _accumulate(m, A, 0, -1)

    out = np.zeros((n, nf, nf), dtype=np.float64)
    for j in range(nf):
        phi_on = _accumulate(m, A, 1, j)
        phi_off = _accumulate(m, A, -1, j)
        out[:, :, j] = (phi_on - phi_off) / 2.0
        out[:, j, j] = 0.0
    out = (out + np.transpose(out, (0, 2, 1))) / 2.0
    for j in range(nf):
        off_sum = out[:, j, :].sum(axis=1) - out[:, j, j]
        out[:, j, j] = phi[:, j] - off_sum
    return InteractionResult(
        base_value=m.expected_value(),
        values=out,
        feature_names=list(m.feature_names),
    )
