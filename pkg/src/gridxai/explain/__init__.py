from .export import read_attributions_csv, write_attributions_csv, write_interactions_csv
from .oracle import (
    MAX_ORACLE_FEATURES,
    brute_force_interactions,
    brute_force_shap,
    subset_value,
)
from .summaries import DependenceData, FeatureImportance, dependence_data, feature_importance
from .treeshap import InteractionResult, ShapResult, interaction_values, tree_shap

__all__ = [
    "MAX_ORACLE_FEATURES",
    "DependenceData",
    "FeatureImportance",
    "InteractionResult",
    "ShapResult",
    "brute_force_interactions",
    "brute_force_shap",
    "dependence_data",
    "feature_importance",
    "interaction_values",
    "read_attributions_csv",
    "subset_value",
    "tree_shap",
    "write_attributions_csv",
    "write_interactions_csv",
]
