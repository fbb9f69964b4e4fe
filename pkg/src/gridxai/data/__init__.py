from .assemble import MAX_GAP_HOURS, StudyDataset, assemble
from .features import (
    CONTROL_AREAS,
    FEATURE_SETS,
    NEIGHBOURS,
    OFFSHORE_ZONES,
    REDUCED_FEATURES,
    FeatureMatrix,
    base_columns,
    engineer_features,
    full_feature_names,
)
from .records import (
    GERMAN_TSOS,
    InterventionRecord,
    complete_cross_border,
    filter_records,
)
from .target import DEFAULT_WINDOW, HourlyTarget, hourly_volume

__all__ = [
    "CONTROL_AREAS",
    "DEFAULT_WINDOW",
    "FEATURE_SETS",
    "GERMAN_TSOS",
    "MAX_GAP_HOURS",
    "NEIGHBOURS",
    "OFFSHORE_ZONES",
    "REDUCED_FEATURES",
    "FeatureMatrix",
    "HourlyTarget",
    "InterventionRecord",
    "StudyDataset",
    "assemble",
    "base_columns",
    "complete_cross_border",
    "engineer_features",
    "filter_records",
    "full_feature_names",
    "hourly_volume",
]
