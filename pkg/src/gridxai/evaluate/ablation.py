"""Proxy-replacement ablations.

Replacing a feature by a smoothed or purely seasonal stand-in tests
whether the model actually uses its fast structure or merely reads a
calendar signal off it. A significant score drop refutes the
coincidence explanation.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from ..data.assemble import StudyDataset
from ..errors import InvalidInputError
from ..model import Hyperparameters
from .search import cross_val_score
from .splits import GroupGapSplit

PROXIES = ("rolling_average", "seasonal_profile", "daily_profile")


def build_proxy(col: pd.Series, proxy: str, window_hours: int = 720) -> pd.Series:
    if proxy == "rolling_average":
        if window_hours < 1:
            raise InvalidInputError("window_hours must be >= 1")
        return col.rolling(window=window_hours, min_periods=1).mean()
    if proxy == "seasonal_profile":
        return col.groupby(col.index.dayofyear).transform("mean")
    if proxy == "daily_profile":
        return col.groupby(col.index.hour).transform("mean")
    raise InvalidInputError(f"unknown proxy kind: {proxy!r}")


def proxy_ablation(dataset: StudyDataset, feature: str, proxy: str,
                   hp: Hyperparameters, cv: GroupGapSplit,
                   window_hours: int = 720) -> dict:
    """Refit with `feature` rebuilt from a proxy; report both mean CV scores."""
    if feature not in dataset.feature_names:
        raise InvalidInputError(f"unknown feature: {feature!r}")

    original = float(np.mean(cross_val_score(dataset, hp, cv)))

    frame = dataset.frame.copy()
    frame[feature] = build_proxy(frame[feature], proxy, window_hours)
    ablated_ds = StudyDataset(frame, dataset.units, dataset.feature_set)
    ablated = float(np.mean(cross_val_score(ablated_ds, hp, cv)))

    report = {
        "feature": feature,
        "proxy": proxy,
        "original_mean_r2": original,
        "ablated_mean_r2": ablated,
        "delta": ablated - original,
    }
    if proxy == "rolling_average":
        report["window_hours"] = window_hours
    return report
