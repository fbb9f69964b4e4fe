"""Regression-tree storage and the slow reference evaluator.

Trees are stored as parallel node arrays (struct-of-arrays) because both
kernel backends and the serializer want flat buffers. Node 0 is always
the root; leaves carry ``split_feature == -1``. Every node records its
``cover`` (training rows that reached it), which the explanation code
uses to weight untaken branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ModelIntegrityError


@dataclass
class TreeArrays:
    split_feature: np.ndarray  # int32, -1 for leaves
    threshold: np.ndarray      # float64, NaN for leaves
    left: np.ndarray           # int32, -1 for leaves
    right: np.ndarray          # int32, -1 for leaves
    default_left: np.ndarray   # uint8, branch taken on missing values
    leaf_value: np.ndarray     # float64, 0.0 on internal nodes
    cover: np.ndarray          # float64, training weight per node

    @property
    def n_nodes(self) -> int:
        return int(self.split_feature.shape[0])

    def is_leaf(self, node: int) -> bool:
        return self.split_feature[node] < 0

    def depth(self) -> int:
        """Longest root-to-leaf path (0 for a lone root leaf)."""
        best = 0
        stack = [(0, 0)]
        while stack:
            node, d = stack.pop()
            if self.is_leaf(node):
                best = max(best, d)
            else:
                stack.append((int(self.left[node]), d + 1))
                stack.append((int(self.right[node]), d + 1))
        return best

    def expected_value(self) -> float:
        """Cover-weighted mean output, i.e. the all-features-hidden descent."""
        def rec(node: int) -> float:
            if self.is_leaf(node):
                return float(self.leaf_value[node])
            l, r = int(self.left[node]), int(self.right[node])
            w = float(self.cover[node])
            return (self.cover[l] * rec(l) + self.cover[r] * rec(r)) / w

        return float(rec(0))

    def predict_one(self, x: np.ndarray) -> float:
        """Slow recursive traversal of a single sample; the prediction oracle."""
        node = 0
        while not self.is_leaf(node):
            f = int(self.split_feature[node])
            xv = x[f]
            if math.isnan(xv):
                go_left = bool(self.default_left[node])
            else:
                go_left = xv <= self.threshold[node]
            node = int(self.left[node]) if go_left else int(self.right[node])
        return float(self.leaf_value[node])

    def validate(self) -> None:
        """Check structural invariants; raises ModelIntegrityError on violation."""
        n = self.n_nodes
        if n == 0:
            raise ModelIntegrityError("tree has no nodes")
        referenced = np.zeros(n, dtype=np.int64)
        for node in range(n):
            if self.is_leaf(node):
                if self.left[node] >= 0 or self.right[node] >= 0:
                    raise ModelIntegrityError(f"leaf {node} has children")
                continue
            if not np.isfinite(self.threshold[node]):
                raise ModelIntegrityError(f"internal node {node} has non-finite threshold")
            l, r = int(self.left[node]), int(self.right[node])
            if not (0 <= l < n and 0 <= r < n) or l == node or r == node:
                raise ModelIntegrityError(f"node {node} has invalid children ({l}, {r})")
            referenced[l] += 1
            referenced[r] += 1
            if self.cover[node] != self.cover[l] + self.cover[r]:
                raise ModelIntegrityError(
                    f"cover additivity violated at node {node}: "
                    f"{self.cover[node]} != {self.cover[l]} + {self.cover[r]}"
                )
        if referenced[0] != 0:
            raise ModelIntegrityError("root is referenced as a child")
        if np.any(referenced[1:] != 1):
            raise ModelIntegrityError("every non-root node must have exactly one parent")
        if np.any(self.cover < 0):
            raise ModelIntegrityError("negative cover")
        # reachability from the root doubles as the cycle check
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        while stack:
            node = stack.pop()
            if seen[node]:
                raise ModelIntegrityError("cycle detected")
            seen[node] = True
            if not self.is_leaf(node):
                stack.extend((int(self.left[node]), int(self.right[node])))
        if not seen.all():
            raise ModelIntegrityError("unreachable nodes present")


class _TreeBuilder:
    """Accumulates nodes while the booster grows a tree."""

    def __init__(self):
        self.split_feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.default_left: list[int] = []
        self.leaf_value: list[float] = []
        self.cover: list[float] = []

    def add_node(self, cover: float) -> int:
        self.split_feature.append(-1)
        self.threshold.append(float("nan"))
        self.left.append(-1)
        self.right.append(-1)
        self.default_left.append(0)
        self.leaf_value.append(0.0)
        self.cover.append(cover)
        return len(self.cover) - 1

    def set_split(self, node: int, feature: int, threshold: float,
                  left: int, right: int, default_left: bool) -> None:
        self.split_feature[node] = feature
        self.threshold[node] = threshold
        self.left[node] = left
        self.right[node] = right
        self.default_left[node] = 1 if default_left else 0

    def set_leaf(self, node: int, value: float) -> None:
        self.leaf_value[node] = value

    def finish(self) -> TreeArrays:
        return TreeArrays(
            split_feature=np.asarray(self.split_feature, dtype=np.int32),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int32),
            right=np.asarray(self.right, dtype=np.int32),
            default_left=np.asarray(self.default_left, dtype=np.uint8),
            leaf_value=np.asarray(self.leaf_value, dtype=np.float64),
            cover=np.asarray(self.cover, dtype=np.float64),
        )


def make_leaf_tree(value: float, cover: float) -> TreeArrays:
    b = _TreeBuilder()
    b.add_node(cover)
    b.set_leaf(0, value)
    return b.finish()


def make_stump(feature: int, threshold: float, left_value: float, right_value: float,
               left_cover: float, right_cover: float, default_left: bool = True) -> TreeArrays:
    """Convenience constructor used heavily by tests."""
    b = _TreeBuilder()
    root = b.add_node(left_cover + right_cover)
    l = b.add_node(left_cover)
    r = b.add_node(right_cover)
    b.set_split(root, feature, threshold, l, r, default_left)
    b.set_leaf(l, left_value)
    b.set_leaf(r, right_value)
    return b.finish()
