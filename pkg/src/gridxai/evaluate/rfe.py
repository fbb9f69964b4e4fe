"""SHAP-guided recursive feature elimination."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..data.assemble import StudyDataset
from ..errors import InvalidInputError
from ..explain import feature_importance, tree_shap
from ..model import Hyperparameters, fit
from .scoring import r2
from .splits import GroupGapSplit, split


@dataclass
class RFEStep:
    active_features: list[str]
    fold_scores: list[float]
    mean_score: float
    importances: dict[str, float]    # fold-averaged, max-normalized
    eliminated: str


@dataclass
class RFETrace:
    steps: list[RFEStep] = field(default_factory=list)
    final_features: list[str] = field(default_factory=list)

    def eliminated_order(self) -> list[str]:
        return [s.eliminated for s in self.steps]

    def to_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for s in self.steps:
                fh.write(json.dumps({
                    "active_features": s.active_features,
                    "fold_scores": s.fold_scores,
                    "mean_score": s.mean_score,
                    "importances": s.importances,
                    "eliminated": s.eliminated,
                }))
                fh.write("\n")

    def summary_frame(self) -> pd.DataFrame:
        rows = [{
            "n_features": len(s.active_features),
            "mean_r2": s.mean_score,
            **{f"fold_{i}_r2": v for i, v in enumerate(s.fold_scores)},
            "eliminated": s.eliminated,
        } for s in self.steps]
        return pd.DataFrame(rows)


def explain_subset(n: int, cap: int) -> np.ndarray:
    if n <= cap:
        return np.arange(n)
    return np.unique(np.linspace(0, n - 1, cap).astype(np.int64))


def rfe(dataset: StudyDataset, hp: Hyperparameters, cv: GroupGapSplit,
        min_features: int = 1, explain_rows: int = 256) -> RFETrace:
    """Iteratively drop the least important feature.

    Each step fits per fold, scores the fold's held-out hours, computes
    normalized importances from SHAP values on (a capped subset of) the
    held-out rows, averages them over folds, and eliminates the minimum.
    Importance ties drop the later column so engineered aggregates,
    declared first, survive longer.
    """
    active = list(dataset.feature_names)
    if len(active) < 2:
        raise InvalidInputError("RFE needs at least 2 features")
    if not 1 <= min_features < len(active):
        raise InvalidInputError("min_features must be in [1, n_features)")

    folds = split(dataset.hours, cv)
    X = dataset.features()
    y = dataset.volume
    trace = RFETrace()

    while len(active) > min_features:
        fold_scores: list[float] = []
        fold_fis: list[np.ndarray] = []
        for train_idx, test_idx in folds:
            m = fit(X.iloc[train_idx][active], y[train_idx], hp)
            fold_scores.append(r2(y[test_idx], m.predict(X.iloc[test_idx][active])))
            rows = test_idx[explain_subset(len(test_idx), explain_rows)]
            s = tree_shap(m, X.iloc[rows][active])
            fold_fis.append(feature_importance(s).values)

        mean_fi = np.mean(fold_fis, axis=0)
        ties = np.nonzero(mean_fi == mean_fi.min())[0]
        drop_idx = int(ties[-1])
        step = RFEStep(
            active_features=list(active),
            fold_scores=[float(v) for v in fold_scores],
            mean_score=float(np.mean(fold_scores)),
            importances={f: float(v) for f, v in zip(active, mean_fi)},
            eliminated=active[drop_idx],
        )
        trace.steps.append(step)
        active.pop(drop_idx)

    trace.final_features = active
    return trace
