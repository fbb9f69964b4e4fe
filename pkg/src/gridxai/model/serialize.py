"""Value-exact JSON round-trip for trained ensembles.

Floats are emitted with Python's shortest round-trip repr, so loading a
document reproduces every threshold, leaf value and cover bit for bit.
"""

from __future__ import annotations

import json
import math

import numpy as np

from ..errors import SchemaMismatchError
from .booster import Ensemble, Hyperparameters
from .trees import TreeArrays

FORMAT_VERSION = "1"


def _tree_to_dict(t: TreeArrays) -> dict:
    nodes = []
    for i in range(t.n_nodes):
        if t.is_leaf(i):
            nodes.append({
                "leaf_value": float(t.leaf_value[i]),
                "cover": float(t.cover[i]),
            })
        else:
            nodes.append({
                "split_feature": int(t.split_feature[i]),
                "threshold": float(t.threshold[i]),
                "left": int(t.left[i]),
                "right": int(t.right[i]),
                "default_branch": "left" if t.default_left[i] else "right",
                "cover": float(t.cover[i]),
            })
    return {"nodes": nodes}


def _tree_from_dict(d: dict) -> TreeArrays:
    nodes = d["nodes"]
    n = len(nodes)
    split_feature = np.full(n, -1, dtype=np.int32)
    threshold = np.full(n, math.nan, dtype=np.float64)
    left = np.full(n, -1, dtype=np.int32)
    right = np.full(n, -1, dtype=np.int32)
    default_left = np.zeros(n, dtype=np.uint8)
    leaf_value = np.zeros(n, dtype=np.float64)
    cover = np.zeros(n, dtype=np.float64)
    for i, nd in enumerate(nodes):
        cover[i] = nd["cover"]
        if "split_feature" in nd:
            split_feature[i] = nd["split_feature"]
            threshold[i] = nd["threshold"]
            left[i] = nd["left"]
            right[i] = nd["right"]
            default_left[i] = 1 if nd.get("default_branch", "left") == "left" else 0
        else:
            leaf_value[i] = nd["leaf_value"]
    return TreeArrays(split_feature, threshold, left, right, default_left, leaf_value, cover)


def to_dict(m: Ensemble) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "feature_names": list(m.feature_names),
        "base_score": float(m.base_score),
        "learning_rate": float(m.learning_rate),
        "hyperparameters": m.hyperparameters.to_dict() if m.hyperparameters else None,
        "seed": m.seed,
        "trees": [_tree_to_dict(t) for t in m.trees],
    }


def from_dict(d: dict) -> Ensemble:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaMismatchError(f"unsupported model format_version: {version!r}")
    hp = d.get("hyperparameters")
    return Ensemble(
        feature_names=list(d["feature_names"]),
        base_score=float(d["base_score"]),
        learning_rate=float(d["learning_rate"]),
        trees=[_tree_from_dict(t) for t in d["trees"]],
        hyperparameters=Hyperparameters.from_dict(hp) if hp else None,
        seed=d.get("seed"),
    )


def to_json(m: Ensemble) -> str:
    return json.dumps(to_dict(m))


def from_json(s: str) -> Ensemble:
    return from_dict(json.loads(s))


def save(m: Ensemble, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(m))
        fh.write("\n")


def load(path) -> Ensemble:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(fh.read())
