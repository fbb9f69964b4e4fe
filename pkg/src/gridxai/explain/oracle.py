"""Exponential-subset Shapley oracles.

Slow but independently correct: conditional expectations use the same
cover-weighted descent as the fast explainer, but Shapley values and
pairwise interaction indices come from full subset enumeration with
factorial weights. Used by the test suite to pin the fast path down.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import CapacityError
from ..model.booster import Ensemble
from ..model.trees import TreeArrays

MAX_ORACLE_FEATURES = 15


def _subset_expectation(t: TreeArrays, x: np.ndarray, mask: int) -> float:
    """E[tree(x_S)] descending the tree; features outside `mask` are hidden."""

    def rec(node: int) -> float:
        if t.is_leaf(node):
            return float(t.leaf_value[node])
        f = int(t.split_feature[node])
        l, r = int(t.left[node]), int(t.right[node])
        if mask >> f & 1:
            xv = x[f]
            if math.isnan(xv):
                go_left = bool(t.default_left[node])
            else:
                go_left = xv <= t.threshold[node]
            return rec(l if go_left else r)
        return (t.cover[l] * rec(l) + t.cover[r] * rec(r)) / t.cover[node]

    return rec(0)


def subset_value(m: Ensemble, x: np.ndarray, mask: int) -> float:
    """Coalition value v(S): model expectation given the features in `mask`."""
    return m.base_score + sum(_subset_expectation(t, x, mask) for t in m.trees)


def _all_subset_values(m: Ensemble, x: np.ndarray) -> np.ndarray:
    nf = m.n_features
    if nf > MAX_ORACLE_FEATURES:
        raise CapacityError(
            f"brute-force oracle limited to {MAX_ORACLE_FEATURES} features, got {nf}"
        )
    v = np.empty(1 << nf, dtype=np.float64)
    for mask in range(1 << nf):
        v[mask] = subset_value(m, x, mask)
    return v


def brute_force_shap(m: Ensemble, x) -> np.ndarray:
    """Exact Shapley values by enumerating every feature subset."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    nf = m.n_features
    v = _all_subset_values(m, x)
    fact = [math.factorial(k) for k in range(nf + 1)]
    phi = np.zeros(nf, dtype=np.float64)
    n_fact = fact[nf]
    for mask in range(1 << nf):
        s = bin(mask).count("1")
        w = fact[s] * fact[nf - s - 1] / n_fact if s < nf else 0.0
        if w == 0.0:
            continue
        for j in range(nf):
            if not mask >> j & 1:
                phi[j] += w * (v[mask | 1 << j] - v[mask])
    return phi


def brute_force_interactions(m: Ensemble, x) -> np.ndarray:
    """Exact pairwise Shapley interaction index; diagonal = main effects."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    nf = m.n_features
    v = _all_subset_values(m, x)
    phi = brute_force_shap(m, x)
    out = np.zeros((nf, nf), dtype=np.float64)
    if nf < 2:
        if nf == 1:
            out[0, 0] = phi[0]
        return out
    fact = [math.factorial(k) for k in range(nf + 1)]
    denom = 2 * fact[nf - 1]
    for mask in range(1 << nf):
        s = bin(mask).count("1")
        if s > nf - 2:
            continue
        w = fact[s] * fact[nf - s - 2] / denom
        for i in range(nf):
            if mask >> i & 1:
                continue
            for j in range(i + 1, nf):
                if mask >> j & 1:
                    continue
                delta = (
                    v[mask | 1 << i | 1 << j]
                    - v[mask | 1 << i]
                    - v[mask | 1 << j]
                    + v[mask]
                )
                out[i, j] += w * delta
                out[j, i] += w * delta
    for j in range(nf):
        out[j, j] = phi[j] - (out[j].sum() - out[j, j])
    return out
