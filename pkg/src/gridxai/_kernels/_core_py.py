"""Pure-Python/NumPy kernel backend.

Mirrors the Cython extension (`_core.pyx`) operation for operation: the
same arithmetic in the same order, so both backends produce identical
float64 results. Keep the two files in sync when touching either.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def node_histograms(codes, slot, grad, n_slots, n_bins):
    """Accumulate per-(node, feature, bin) gradient sums and row counts.

    codes: uint16 [n_rows, n_features], bin code per cell (0 = missing).
    slot:  int32 [n_rows], node slot per row; negative rows are skipped.
    grad:  float64 [n_rows].
    """
    n_rows, n_feat = codes.shape
    sum_g = np.zeros((n_slots, n_feat, n_bins), dtype=np.float64)
    count = np.zeros((n_slots, n_feat, n_bins), dtype=np.float64)
    idx = np.nonzero(slot >= 0)[0]
    if idx.size == 0:
        return sum_g, count
    base = slot[idx].astype(np.int64) * n_bins
    g = grad[idx]
    length = n_slots * n_bins
    for f in range(n_feat):
        key = base + codes[idx, f]
        sum_g[:, f, :] = np.bincount(key, weights=g, minlength=length).reshape(n_slots, n_bins)
        count[:, f, :] = np.bincount(key, minlength=length).reshape(n_slots, n_bins)
    return sum_g, count


def predict_tree(split_feature, threshold, left, right, default_left, leaf_value, X):
    """Leaf value reached by each row of X for one tree (NaN follows default)."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    while True:
        feat = split_feature[node]
        pending = np.nonzero(feat >= 0)[0]
        if pending.size == 0:
            break
        cur = node[pending]
        x = X[pending, feat[pending]]
        go_left = x <= threshold[cur]
        missing = np.isnan(x)
        if missing.any():
            go_left = np.where(missing, default_left[cur].astype(bool), go_left)
        node[pending] = np.where(go_left, left[cur], right[cur])
    return leaf_value[node]


def _extend(pf, pz, po, pw, off, unique_depth, zero_fraction, one_fraction, feature_index):
    pf[off + unique_depth] = feature_index
    pz[off + unique_depth] = zero_fraction
    po[off + unique_depth] = one_fraction
    pw[off + unique_depth] = 1.0 if unique_depth == 0 else 0.0
    ud1 = unique_depth + 1
    for i in range(unique_depth - 1, -1, -1):
        pw[off + i + 1] += one_fraction * pw[off + i] * (i + 1) / ud1
        pw[off + i] = zero_fraction * pw[off + i] * (unique_depth - i) / ud1


def _unwind(pf, pz, po, pw, off, unique_depth, path_index):
    one_fraction = po[off + path_index]
    zero_fraction = pz[off + path_index]
    next_one = pw[off + unique_depth]
    ud1 = unique_depth + 1
    for i in range(unique_depth - 1, -1, -1):
        if one_fraction != 0.0:
            tmp = pw[off + i]
            pw[off + i] = next_one * ud1 / ((i + 1) * one_fraction)
            next_one = tmp - pw[off + i] * zero_fraction * (unique_depth - i) / ud1
        else:
            pw[off + i] = pw[off + i] * ud1 / (zero_fraction * (unique_depth - i))
    for i in range(path_index, unique_depth):
        pf[off + i] = pf[off + i + 1]
        pz[off + i] = pz[off + i + 1]
        po[off + i] = po[off + i + 1]


def _unwound_sum(pz, po, pw, off, unique_depth, path_index):
    one_fraction = po[off + path_index]
    zero_fraction = pz[off + path_index]
    next_one = pw[off + unique_depth]
    total = 0.0
    if one_fraction != 0.0:
        for i in range(unique_depth - 1, -1, -1):
            tmp = next_one / ((i + 1) * one_fraction)
            total += tmp
            next_one = pw[off + i] - tmp * zero_fraction * (unique_depth - i)
    else:
        for i in range(unique_depth - 1, -1, -1):
            total += pw[off + i] / (zero_fraction * (unique_depth - i))
    return total * (unique_depth + 1)


def _shap_recurse(split_feature, threshold, left, right, default_left, leaf_value, cover,
                  x, phi, node, unique_depth, parent_off,
                  pf, pz, po, pw,
                  parent_zero, parent_one, parent_feature,
                  condition, condition_feature, condition_fraction):
    if condition_fraction == 0.0:
        return

    off = parent_off + unique_depth + 1
    for i in range(unique_depth + 1):
        pf[off + i] = pf[parent_off + i]
        pz[off + i] = pz[parent_off + i]
        po[off + i] = po[parent_off + i]
        pw[off + i] = pw[parent_off + i]

    if condition == 0 or condition_feature != parent_feature:
        _extend(pf, pz, po, pw, off, unique_depth, parent_zero, parent_one, parent_feature)

    if left[node] < 0:
        v = leaf_value[node] * condition_fraction
        for i in range(1, unique_depth + 1):
            w = _unwound_sum(pz, po, pw, off, unique_depth, i)
            phi[pf[off + i]] += w * (po[off + i] - pz[off + i]) * v
        return

    sf = split_feature[node]
    xv = x[sf]
    if math.isnan(xv):
        go_left = bool(default_left[node])
    else:
        go_left = xv <= threshold[node]
    hot = left[node] if go_left else right[node]
    cold = right[node] if go_left else left[node]
    w = cover[node]
    hot_zero = cover[hot] / w
    cold_zero = cover[cold] / w
    incoming_zero = 1.0
    incoming_one = 1.0

    # undo an earlier split on the same feature before re-splitting on it
    path_index = 0
    while path_index <= unique_depth:
        if pf[off + path_index] == sf:
            break
        path_index += 1
    if path_index != unique_depth + 1:
        incoming_zero = pz[off + path_index]
        incoming_one = po[off + path_index]
        _unwind(pf, pz, po, pw, off, unique_depth, path_index)
        unique_depth -= 1

    hot_cf = condition_fraction
    cold_cf = condition_fraction
    if condition > 0 and sf == condition_feature:
        cold_cf = 0.0
        unique_depth -= 1
    elif condition < 0 and sf == condition_feature:
        hot_cf *= hot_zero
        cold_cf *= cold_zero
        unique_depth -= 1

    _shap_recurse(split_feature, threshold, left, right, default_left, leaf_value, cover,
                  x, phi, hot, unique_depth + 1, off, pf, pz, po, pw,
                  hot_zero * incoming_zero, incoming_one, sf,
                  condition, condition_feature, hot_cf)
    _shap_recurse(split_feature, threshold, left, right, default_left, leaf_value, cover,
                  x, phi, cold, unique_depth + 1, off, pf, pz, po, pw,
                  cold_zero * incoming_zero, 0.0, sf,
                  condition, condition_feature, cold_cf)


def tree_shap_batch(split_feature, threshold, left, right, default_left, leaf_value, cover,
                    tree_depth, X, phi, condition=0, condition_feature=-1):
    """Accumulate one tree's SHAP contributions for every row of X into phi.

    phi has shape [n_rows, n_features]. `tree_depth` is the longest
    root-to-leaf path; it sizes the path scratch buffers. With a nonzero
    `condition`, contributions are conditioned on `condition_feature`
    being present (+1) or hidden (-1), which is the building block for
    pairwise interaction values.
    """
    maxd = tree_depth + 2
    size = (maxd * (maxd + 1)) // 2 + maxd
    pf = [0] * size
    pz = [0.0] * size
    po = [0.0] * size
    pw = [0.0] * size
    sf = split_feature.tolist()
    th = threshold.tolist()
    lf = left.tolist()
    rt = right.tolist()
    dl = default_left.tolist()
    lv = leaf_value.tolist()
    cv = cover.tolist()
    n = X.shape[0]
    for i in range(n):
        x = X[i].tolist()
        # accumulate into the existing row so the additions happen in the
        # same order as the compiled kernel's in-place updates
        row = phi[i].tolist()
        _shap_recurse(sf, th, lf, rt, dl, lv, cv, x, row, 0, 0, -1,
                      pf, pz, po, pw, 1.0, 1.0, -1,
                      condition, condition_feature, 1.0)
        phi[i] = row
