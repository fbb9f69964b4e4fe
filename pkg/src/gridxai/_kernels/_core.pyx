# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

Operation-for-operation transliteration of ``_core_py.py`` (same
arithmetic, same order, compiled with -ffp-contract=off), so results are
bit-identical across backends. Keep the two files in sync.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport isnan

cnp.import_array()

BACKEND = "cython"


def node_histograms(codes, slot, grad, int n_slots, int n_bins):
    """See _core_py.node_histograms."""
    cdef cnp.uint16_t[:, ::1] c = np.ascontiguousarray(codes, dtype=np.uint16)
    cdef cnp.int32_t[::1] s = np.ascontiguousarray(slot, dtype=np.int32)
    cdef double[::1] g = np.ascontiguousarray(grad, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0], m = c.shape[1]
    sum_g_arr = np.zeros((n_slots, m, n_bins), dtype=np.float64)
    count_arr = np.zeros((n_slots, m, n_bins), dtype=np.float64)
    cdef double[:, :, ::1] sum_g = sum_g_arr
    cdef double[:, :, ::1] count = count_arr
    cdef Py_ssize_t i, f
    cdef int si
    cdef double gi
    for i in range(n):
        si = s[i]
        if si < 0:
            continue
        gi = g[i]
        for f in range(m):
            sum_g[si, f, c[i, f]] += gi
            count[si, f, c[i, f]] += 1.0
    return sum_g_arr, count_arr


def predict_tree(split_feature, threshold, left, right, default_left, leaf_value, X):
    """See _core_py.predict_tree."""
    cdef cnp.int32_t[::1] sf = np.ascontiguousarray(split_feature, dtype=np.int32)
    cdef double[::1] th = np.ascontiguousarray(threshold, dtype=np.float64)
    cdef cnp.int32_t[::1] lv_ = np.ascontiguousarray(left, dtype=np.int32)
    cdef cnp.int32_t[::1] rv_ = np.ascontiguousarray(right, dtype=np.int32)
    cdef cnp.uint8_t[::1] dl = np.ascontiguousarray(default_left, dtype=np.uint8)
    cdef double[::1] leaf = np.ascontiguousarray(leaf_value, dtype=np.float64)
    cdef double[:, ::1] A = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int node
    cdef double xv
    for i in range(n):
        node = 0
        while sf[node] >= 0:
            xv = A[i, sf[node]]
            if isnan(xv):
                node = lv_[node] if dl[node] else rv_[node]
            elif xv <= th[node]:
                node = lv_[node]
            else:
                node = rv_[node]
        out[i] = leaf[node]
    return out_arr


cdef void _extend(cnp.int32_t* pf, double* pz, double* po, double* pw,
                  int off, int unique_depth,
                  double zero_fraction, double one_fraction, int feature_index) noexcept:
    cdef int i, ud1
    pf[off + unique_depth] = feature_index
    pz[off + unique_depth] = zero_fraction
    po[off + unique_depth] = one_fraction
    pw[off + unique_depth] = 1.0 if unique_depth == 0 else 0.0
    ud1 = unique_depth + 1
    for i in range(unique_depth - 1, -1, -1):
        pw[off + i + 1] += one_fraction * pw[off + i] * (i + 1) / ud1
        pw[off + i] = zero_fraction * pw[off + i] * (unique_depth - i) / ud1


cdef void _unwind(cnp.int32_t* pf, double* pz, double* po, double* pw,
                  int off, int unique_depth, int path_index) noexcept:
    cdef double one_fraction = po[off + path_index]
    cdef double zero_fraction = pz[off + path_index]
    cdef double next_one = pw[off + unique_depth]
    cdef double tmp
    cdef int i, ud1
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


cdef double _unwound_sum(double* pz, double* po, double* pw,
                         int off, int unique_depth, int path_index) noexcept:
    cdef double one_fraction = po[off + path_index]
    cdef double zero_fraction = pz[off + path_index]
    cdef double next_one = pw[off + unique_depth]
    cdef double total = 0.0
    cdef double tmp
    cdef int i
    if one_fraction != 0.0:
        for i in range(unique_depth - 1, -1, -1):
            tmp = next_one / ((i + 1) * one_fraction)
            total += tmp
            next_one = pw[off + i] - tmp * zero_fraction * (unique_depth - i)
    else:
        for i in range(unique_depth - 1, -1, -1):
            total += pw[off + i] / (zero_fraction * (unique_depth - i))
    return total * (unique_depth + 1)


cdef void _shap_recurse(cnp.int32_t* split_feature, double* threshold,
                        cnp.int32_t* left, cnp.int32_t* right,
                        cnp.uint8_t* default_left, double* leaf_value, double* cover,
                        double* x, double* phi,
                        int node, int unique_depth, int parent_off,
                        cnp.int32_t* pf, double* pz, double* po, double* pw,
                        double parent_zero, double parent_one, int parent_feature,
                        int condition, int condition_feature, double condition_fraction) noexcept:
    cdef int off, i, sf, hot, cold, path_index
    cdef double v, w, xv, hot_zero, cold_zero, incoming_zero, incoming_one
    cdef double hot_cf, cold_cf
    cdef bint go_left

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
    if isnan(xv):
        go_left = default_left[node] != 0
    else:
        go_left = xv <= threshold[node]
    hot = left[node] if go_left else right[node]
    cold = right[node] if go_left else left[node]
    w = cover[node]
    hot_zero = cover[hot] / w
    cold_zero = cover[cold] / w
    incoming_zero = 1.0
    incoming_one = 1.0

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
                    int tree_depth, X, phi, int condition=0, int condition_feature=-1):
    """See _core_py.tree_shap_batch."""
    cdef cnp.int32_t[::1] sf = np.ascontiguousarray(split_feature, dtype=np.int32)
    cdef double[::1] th = np.ascontiguousarray(threshold, dtype=np.float64)
    cdef cnp.int32_t[::1] lf = np.ascontiguousarray(left, dtype=np.int32)
    cdef cnp.int32_t[::1] rt = np.ascontiguousarray(right, dtype=np.int32)
    cdef cnp.uint8_t[::1] dl = np.ascontiguousarray(default_left, dtype=np.uint8)
    cdef double[::1] lv = np.ascontiguousarray(leaf_value, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(cover, dtype=np.float64)
    cdef double[:, ::1] A = np.ascontiguousarray(X, dtype=np.float64)
    if not (isinstance(phi, np.ndarray) and phi.dtype == np.float64
            and phi.flags["C_CONTIGUOUS"]):
        raise TypeError("phi must be a C-contiguous float64 array")
    cdef double[:, ::1] P = phi

    cdef int maxd = tree_depth + 2
    cdef int size = (maxd * (maxd + 1)) // 2 + maxd
    pf_arr = np.zeros(size, dtype=np.int32)
    pz_arr = np.zeros(size, dtype=np.float64)
    po_arr = np.zeros(size, dtype=np.float64)
    pw_arr = np.zeros(size, dtype=np.float64)
    cdef cnp.int32_t[::1] pf = pf_arr
    cdef double[::1] pz = pz_arr
    cdef double[::1] po = po_arr
    cdef double[::1] pw = pw_arr

    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t i
    for i in range(n):
        _shap_recurse(&sf[0], &th[0], &lf[0], &rt[0], &dl[0], &lv[0], &cv[0],
                      &A[i, 0], &P[i, 0], 0, 0, -1,
                      &pf[0], &pz[0], &po[0], &pw[0],
                      1.0, 1.0, -1, condition, condition_feature, 1.0)
