"""Global model summaries derived from per-sample attributions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from ..errors import InvalidInputError
from ..model.booster import Ensemble, coerce_matrix
from .treeshap import InteractionResult, ShapResult, interaction_values


@dataclass
class FeatureImportance:
    values: np.ndarray           # per-feature scores in [0, 1], max exactly 1
    normalizer: float            # sum-of-|phi| scale divided out, target units
    feature_names: list[str]
    degenerate: bool = False     # all attributions were zero

    def ranking(self) -> list[str]:
        order = np.argsort(-self.values, kind="stable")
        return [self.feature_names[i] for i in order]

    def as_series(self) -> pd.Series:
        return pd.Series(self.values, index=self.feature_names, name="importance")


def feature_importance(s: ShapResult) -> FeatureImportance:
    """Mean absolute attribution per feature, scaled so the maximum is 1."""
    if s.n_samples < 1:
        raise InvalidInputError("need at least one explained sample")
    means = np.abs(s.values).mean(axis=0)
    normalizer = float(means.max())
    if normalizer == 0.0:
        return FeatureImportance(
            values=np.zeros_like(means),
            normalizer=0.0,
            feature_names=list(s.feature_names),
            degenerate=True,
        )
    return FeatureImportance(
        values=means / normalizer,
        normalizer=normalizer,
        feature_names=list(s.feature_names),
    )


@dataclass
class DependenceData:
    feature: str
    color_feature: Optional[str]
    table: pd.DataFrame          # columns: feature_value, shap_value, color_value


def dependence_data(s: ShapResult, X, feature: str, color_feature: str = "auto",
                    *, model: Optional[Ensemble] = None,
                    interactions: Optional[InteractionResult] = None) -> DependenceData:
    """Per-sample (x_j, phi_j) pairs plus a coloring feature.

    ``color_feature="auto"`` picks the feature interacting most strongly
    with `feature` (largest mean |interaction|), which needs either a
    precomputed InteractionResult or the model to compute one from.
    """
    A, names = coerce_matrix(X, list(s.feature_names))
    if feature not in names:
        raise InvalidInputError(f"unknown feature: {feature!r}")
    j = names.index(feature)

    color: Optional[str] = color_feature
    if color_feature == "auto":
        if len(names) < 2:
            color = None
        else:
            if interactions is None:
                if model is None:
                    raise InvalidInputError(
                        "auto coloring needs `interactions` or `model` to derive them"
                    )
                interactions = interaction_values(model, X)
            strength = np.abs(interactions.values[:, j, :]).sum(axis=0)
            strength[j] = -1.0
            color = names[int(np.argmax(strength))]
    elif color_feature is not None and color_feature not in names:
        raise InvalidInputError(f"unknown color feature: {color_feature!r}")

    data = {
        "feature_value": A[:, j],
        "shap_value": s.values[:, j],
    }
    if color is not None:
        data["color_value"] = A[:, names.index(color)]
    return DependenceData(feature=feature, color_feature=color, table=pd.DataFrame(data))
