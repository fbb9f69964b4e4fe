"""Join target and features into the model-ready hourly dataset."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..errors import InvalidInputError
from .features import FeatureMatrix
from .target import HourlyTarget

MAX_GAP_HOURS = 3  # longest telemetry gap bridged by linear interpolation


@dataclass
class StudyDataset:
    frame: pd.DataFrame              # index: UTC hour; columns: volume + features
    units: dict[str, str] = field(default_factory=dict)
    feature_set: str = "full"

    @property
    def hours(self) -> pd.DatetimeIndex:
        return self.frame.index

    @property
    def feature_names(self) -> list[str]:
        return [c for c in self.frame.columns if c != "volume"]

    @property
    def volume(self) -> np.ndarray:
        return self.frame["volume"].to_numpy(dtype=np.float64)

    def features(self) -> pd.DataFrame:
        return self.frame[self.feature_names]

    def with_features(self, names) -> "StudyDataset":
        return StudyDataset(self.frame[["volume", *names]], self.units, self.feature_set)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["hour", "volume", *self.feature_names])
            values = self.frame[["volume", *self.feature_names]].to_numpy()
            stamps = [ts.strftime("%Y-%m-%dT%H:%M:%SZ") for ts in self.frame.index]
            for ts, row in zip(stamps, values):
                w.writerow([ts, *(repr(float(v)) for v in row)])

    @classmethod
    def from_csv(cls, path, units=None, feature_set="full") -> "StudyDataset":
        frame = pd.read_csv(path, float_precision="round_trip")
        if "hour" not in frame.columns or "volume" not in frame.columns:
            raise InvalidInputError("dataset CSV needs 'hour' and 'volume' columns")
        frame["hour"] = pd.to_datetime(frame["hour"], utc=True)
        frame = frame.set_index("hour")
        return cls(frame, units or {}, feature_set)


def _fill_short_gaps(col: pd.Series, max_gap: int) -> tuple[pd.Series, int]:
    """Linearly interpolate NaN runs of length <= max_gap (interior only)."""
    isna = col.isna().to_numpy()
    if not isna.any():
        return col, 0
    filled = col.interpolate(method="linear", limit_area="inside")
    run_id = np.cumsum(~isna) * isna            # label NaN runs by preceding count
    run_len = pd.Series(run_id).groupby(run_id).transform("size").to_numpy()
    keep_nan = isna & (run_len > max_gap)
    out = filled.copy()
    out[keep_nan] = np.nan
    n_filled = int(isna.sum() - out.isna().sum())
    return out, n_filled


def assemble(target: HourlyTarget, features: FeatureMatrix,
             max_gap_hours: int = MAX_GAP_HOURS) -> tuple[StudyDataset, dict]:
    """Inner-join target and features on the hour; gap-fill then drop.

    Short feature gaps (<= max_gap_hours consecutive) are linearly
    interpolated; rows still missing any feature afterwards are dropped.
    Returns the dataset plus a provenance report with kept/dropped row
    counts and per-column missing/filled counts.
    """
    common = target.hours.intersection(features.hours).sort_values()
    if len(common) == 0:
        raise InvalidInputError("target and features share no hours")

    y = target.series().reindex(common)
    fx = features.frame.reindex(common)

    missing_before = {c: int(fx[c].isna().sum()) for c in fx.columns}
    filled_counts: dict[str, int] = {}
    for c in fx.columns:
        fx[c], n = _fill_short_gaps(fx[c], max_gap_hours)
        filled_counts[c] = n

    keep = ~fx.isna().any(axis=1)
    dropped = int((~keep).sum())
    frame = pd.concat([y, fx], axis=1)[keep.to_numpy()]

    provenance = {
        "rows_in_intersection": int(len(common)),
        "rows_kept": int(keep.sum()),
        "rows_dropped": dropped,
        "max_gap_hours": max_gap_hours,
        "missing_before_fill": missing_before,
        "filled": filled_counts,
    }
    dataset = StudyDataset(frame, dict(features.units, volume="MWh"), features.feature_set)
    return dataset, provenance
