"""Gradient-boosted regression trees with histogram split finding.

Squared-error loss, quantile-binned features, learned default branch for
missing values, L2 penalty on leaf values. Leaf values absorb the
learning rate, so a prediction is simply ``base_score + sum(tree(x))``.
Training is deterministic for a fixed (data, hyperparameters, seed).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .. import _kernels as kernels
from ..errors import InvalidInputError, SchemaMismatchError
from .trees import TreeArrays, _TreeBuilder

_MIN_SPLIT_GAIN = 1e-12  # guards against splits on pure float noise


@dataclass(frozen=True)
class Hyperparameters:
    n_trees: int = 300
    max_depth: int = 6
    learning_rate: float = 0.05
    min_child_cover: float = 5.0
    subsample_rows: float = 1.0
    subsample_features: float = 1.0
    n_histogram_bins: int = 256
    l2_leaf_penalty: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_trees < 1:
            raise InvalidInputError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise InvalidInputError("max_depth must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise InvalidInputError("learning_rate must be in (0, 1]")
        if self.min_child_cover <= 0:
            raise InvalidInputError("min_child_cover must be positive")
        for name in ("subsample_rows", "subsample_features"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidInputError(f"{name} must be in (0, 1]")
        if self.n_histogram_bins < 2:
            raise InvalidInputError("n_histogram_bins must be >= 2")
        if self.l2_leaf_penalty < 0:
            raise InvalidInputError("l2_leaf_penalty must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparameters":
        return cls(**d)


def coerce_matrix(X, feature_names: Optional[Sequence[str]] = None):
    """Normalize X to (float64 ndarray, feature name list).

    Accepts a 2-D ndarray, a pandas DataFrame, or anything exposing a
    ``frame`` DataFrame attribute (the dataset module's FeatureMatrix).
    When ``feature_names`` is given, DataFrame columns must match that
    set exactly and are reordered to it.
    """
    frame = getattr(X, "frame", None)
    if frame is not None:
        X = frame
    if hasattr(X, "columns"):
        cols = [str(c) for c in X.columns]
        if feature_names is None:
            return np.asarray(X, dtype=np.float64), cols
        missing = [c for c in feature_names if c not in cols]
        if missing:
            raise SchemaMismatchError(f"missing feature columns: {missing}")
        unknown = [c for c in cols if c not in feature_names]
        if unknown:
            raise SchemaMismatchError(f"unknown feature columns: {unknown}")
        return np.asarray(X[list(feature_names)], dtype=np.float64), list(feature_names)
    A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2:
        raise InvalidInputError("feature matrix must be 2-dimensional")
    if feature_names is None:
        return A, [f"f{j}" for j in range(A.shape[1])]
    if A.shape[1] != len(feature_names):
        raise SchemaMismatchError(
            f"matrix has {A.shape[1]} columns, expected {len(feature_names)}"
        )
    return A, list(feature_names)


@dataclass
class Ensemble:
    feature_names: list[str]
    base_score: float
    learning_rate: float
    trees: list[TreeArrays]
    hyperparameters: Optional[Hyperparameters] = None
    seed: Optional[int] = None

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def predict(self, X) -> np.ndarray:
        A, _ = coerce_matrix(X, self.feature_names)
        out = np.full(A.shape[0], self.base_score, dtype=np.float64)
        for t in self.trees:
            out += kernels.predict_tree(
                t.split_feature, t.threshold, t.left, t.right,
                t.default_left, t.leaf_value, A,
            )
        return out

    def predict_naive(self, X) -> np.ndarray:
        """Per-sample recursive traversal; the oracle the fast path is checked against."""
        A, _ = coerce_matrix(X, self.feature_names)
        out = np.full(A.shape[0], self.base_score, dtype=np.float64)
        for i in range(A.shape[0]):
            x = A[i]
            for t in self.trees:
                out[i] += t.predict_one(x)
        return out

    def expected_value(self) -> float:
        """Model output expectation over the training distribution."""
        return float(self.base_score + sum(t.expected_value() for t in self.trees))

    def validate(self) -> None:
        for t in self.trees:
            t.validate()
            used = t.split_feature[t.split_feature >= 0]
            if used.size and used.max() >= self.n_features:
                raise SchemaMismatchError("tree references unknown feature index")


def _quantile_edges(X: np.ndarray, n_bins: int) -> list[np.ndarray]:
    """Candidate thresholds per feature: unique values, or data quantiles."""
    edges = []
    for f in range(X.shape[1]):
        col = X[:, f]
        finite = col[np.isfinite(col)]
        if finite.size == 0:
            edges.append(np.empty(0, dtype=np.float64))
            continue
        uniq = np.unique(finite)
        if uniq.size <= n_bins:
            edges.append(uniq.astype(np.float64))
        else:
            probs = np.arange(1, n_bins) / n_bins
            q = np.quantile(finite, probs, method="lower")
            edges.append(np.unique(q).astype(np.float64))
    return edges


def _bin_codes(X: np.ndarray, edges: list[np.ndarray]) -> np.ndarray:
    """uint16 codes per cell: 0 = missing, k means x <= edges[k-1] (first match)."""
    n, m = X.shape
    codes = np.zeros((n, m), dtype=np.uint16)
    for f in range(m):
        col = X[:, f]
        ok = ~np.isnan(col)
        codes[ok, f] = np.searchsorted(edges[f], col[ok], side="left").astype(np.uint16) + 1
    return codes


def _grow_tree(codes_sub, edges, active, grad, hp: Hyperparameters):
    """Grow one tree on pre-binned rows; returns (TreeArrays, leaf ids per row) or None.

    ``codes_sub`` is [n_sub, n_active] uint16, column j belonging to global
    feature ``active[j]``. Returns None when the root cannot be split.
    """
    n_sub = codes_sub.shape[0]
    n_bins = int(codes_sub.max(initial=0)) + 1 if codes_sub.size else 1
    lam = hp.l2_leaf_penalty
    mcc = hp.min_child_cover

    builder = _TreeBuilder()
    node_g: list[float] = []
    node_h: list[float] = []
    root = builder.add_node(float(n_sub))
    node_g.append(float(np.sum(grad)))
    node_h.append(float(n_sub))

    row_node = np.zeros(n_sub, dtype=np.int64)
    frontier = [root] if n_sub >= 2 * mcc else []
    depth = 0

    while frontier and depth < hp.max_depth:
        n_slots = len(frontier)
        slot_of = np.full(len(node_g), -1, dtype=np.int32)
        for s, node in enumerate(frontier):
            slot_of[node] = s
        row_slot = slot_of[row_node]

        if n_bins <= 2:
            break  # at most one finite bin anywhere: nothing can split

        hist_g, hist_c = kernels.node_histograms(
            codes_sub, row_slot, grad, n_slots, n_bins
        )

        # candidate split s puts finite codes <= s left; bin 0 holds missings
        g_miss = hist_g[:, :, 0]
        h_miss = hist_c[:, :, 0]
        cg = np.cumsum(hist_g[:, :, 1:], axis=2)
        ch = np.cumsum(hist_c[:, :, 1:], axis=2)
        g_fin = cg[:, :, -1]
        h_fin = ch[:, :, -1]
        gl0 = cg[:, :, :-1]
        hl0 = ch[:, :, :-1]
        gr0 = g_fin[:, :, None] - gl0
        hr0 = h_fin[:, :, None] - hl0

        parent_g = np.array([node_g[n] for n in frontier])
        parent_h = np.array([node_h[n] for n in frontier])
        parent_score = parent_g**2 / (parent_h + lam)

        def side_gain(gl, hl, gr, hr):
            with np.errstate(divide="ignore", invalid="ignore"):
                gain = gl**2 / (hl + lam) + gr**2 / (hr + lam)
            gain -= parent_score[:, None, None]
            valid = (hl >= mcc) & (hr >= mcc)
            return np.where(valid, gain, -np.inf)

        # last axis: default branch left (0) / right (1); argmax tie prefers left
        gains = np.stack(
            [
                side_gain(gl0 + g_miss[:, :, None], hl0 + h_miss[:, :, None], gr0, hr0),
                side_gain(gl0, hl0, gr0 + g_miss[:, :, None], hr0 + h_miss[:, :, None]),
            ],
            axis=-1,
        )
        flat = gains.reshape(n_slots, -1)
        best_idx = np.argmax(flat, axis=1)
        best_gain = flat[np.arange(n_slots), best_idx]

        n_cand = gains.shape[2]
        next_frontier: list[int] = []
        for s, node in enumerate(frontier):
            if not np.isfinite(best_gain[s]) or best_gain[s] <= _MIN_SPLIT_GAIN:
                builder.set_leaf(node, -hp.learning_rate * node_g[node] / (node_h[node] + lam))
                continue
            f_local, rem = divmod(int(best_idx[s]), n_cand * 2)
            split_pos, direction = divmod(rem, 2)
            miss_left = direction == 0
            feature = int(active[f_local])
            threshold = float(edges[feature][split_pos])

            gl = float(gl0[s, f_local, split_pos]) + (float(g_miss[s, f_local]) if miss_left else 0.0)
            hl = float(hl0[s, f_local, split_pos]) + (float(h_miss[s, f_local]) if miss_left else 0.0)
            gr = float(node_g[node]) - gl
            hr = float(node_h[node]) - hl

            l = builder.add_node(hl)
            node_g.append(gl)
            node_h.append(hl)
            r = builder.add_node(hr)
            node_g.append(gr)
            node_h.append(hr)
            builder.set_split(node, feature, threshold, l, r, miss_left)

            c = codes_sub[:, f_local]
            mine = row_node == node
            go_left = (c >= 1) & (c <= split_pos + 1)
            if miss_left:
                go_left |= c == 0
            row_node[mine] = np.where(go_left[mine], l, r)

            for child, h_child in ((l, hl), (r, hr)):
                if h_child >= 2 * mcc:
                    next_frontier.append(child)
                else:
                    builder.set_leaf(child, -hp.learning_rate * node_g[child] / (node_h[child] + lam))
        frontier = next_frontier
        depth += 1

    for node in frontier:
        builder.set_leaf(node, -hp.learning_rate * node_g[node] / (node_h[node] + lam))

    if builder.split_feature[0] < 0 and len(builder.cover) == 1:
        return None
    return builder.finish()


def fit(X, y, hp: Optional[Hyperparameters] = None,
        feature_names: Optional[Sequence[str]] = None) -> Ensemble:
    """Train a boosted ensemble; see Hyperparameters for the knobs.

    base_score is mean(y); each round fits a tree to the squared-error
    gradient. Rounds whose tree degenerates to a bare root leaf are
    dropped, so a constant target yields a trees-free model.
    """
    hp = hp or Hyperparameters()
    hp.validate()
    A, names = coerce_matrix(X, feature_names)
    yv = np.asarray(y, dtype=np.float64).reshape(-1)
    if A.shape[0] == 0 or yv.shape[0] == 0:
        raise InvalidInputError("empty training input")
    if A.shape[0] != yv.shape[0]:
        raise InvalidInputError("X and y row counts differ")
    if A.shape[0] < 2:
        raise InvalidInputError("need at least 2 training rows")
    if not np.all(np.isfinite(yv)):
        raise InvalidInputError("target contains non-finite values")

    n, m = A.shape
    base_score = float(np.mean(yv))
    edges = _quantile_edges(A, hp.n_histogram_bins)
    codes = _bin_codes(A, edges)

    rng = np.random.default_rng(hp.seed)
    pred = np.full(n, base_score, dtype=np.float64)
    trees: list[TreeArrays] = []

    for _ in range(hp.n_trees):
        if hp.subsample_rows < 1.0:
            k = max(2, int(round(n * hp.subsample_rows)))
            rows = np.sort(rng.choice(n, size=k, replace=False))
        else:
            rows = np.arange(n)
        if hp.subsample_features < 1.0:
            k = max(1, int(round(m * hp.subsample_features)))
            active = np.sort(rng.choice(m, size=k, replace=False))
        else:
            active = np.arange(m)

        grad = pred[rows] - yv[rows]
        tree = _grow_tree(np.ascontiguousarray(codes[np.ix_(rows, active)]),
                          edges, active, grad, hp)
        if tree is None:
            continue
        trees.append(tree)
        pred += kernels.predict_tree(
            tree.split_feature, tree.threshold, tree.left, tree.right,
            tree.default_left, tree.leaf_value, A,
        )

    return Ensemble(
        feature_names=names,
        base_score=base_score,
        learning_rate=hp.learning_rate,
        trees=trees,
        hyperparameters=hp,
        seed=hp.seed,
    )
