"""Hourly intervention-volume target."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from ..errors import InvalidInputError
from .records import InterventionRecord

# default study window: May 2019 through January 2023, hour resolution
DEFAULT_WINDOW = (
    datetime(2019, 5, 1, tzinfo=timezone.utc),
    datetime(2023, 2, 1, tzinfo=timezone.utc),
)


@dataclass
class HourlyTarget:
    hours: pd.DatetimeIndex      # contiguous UTC hours
    volume: np.ndarray           # MWh per hour, >= 0

    def series(self) -> pd.Series:
        return pd.Series(self.volume, index=self.hours, name="volume")

    def total_energy(self) -> float:
        return float(self.volume.sum())


def _check_hour_aligned(ts: datetime, label: str) -> pd.Timestamp:
    t = pd.Timestamp(ts)
    if t.tzinfo is None:
        raise InvalidInputError(f"window {label} must be timezone-aware")
    t = t.tz_convert("UTC")
    if t != t.floor("h"):
        raise InvalidInputError(f"window {label} must be aligned to an hour boundary: {ts}")
    return t


def hourly_volume(records: Iterable[InterventionRecord],
                  window: Optional[tuple] = None) -> HourlyTarget:
    """Sum of intervention magnitudes per hour, in MWh.

    Each record contributes power * overlap to every hour it overlaps,
    regardless of direction: opposing interventions add up rather than
    cancel. Hours without any intervention get volume 0.
    """
    if window is None:
        window = DEFAULT_WINDOW
    start = _check_hour_aligned(window[0], "start")
    end = _check_hour_aligned(window[1], "end")
    if end <= start:
        raise InvalidInputError("window end must be after start")

    hours = pd.date_range(start, end, freq="h", inclusive="left")
    volume = np.zeros(len(hours), dtype=np.float64)
    t0 = start.value  # ns since epoch
    hour_ns = 3_600_000_000_000

    for r in records:
        rs = max(pd.Timestamp(r.start).tz_convert("UTC").value, t0)
        re = min(pd.Timestamp(r.end).tz_convert("UTC").value, end.value)
        if re <= rs:
            continue
        first = (rs - t0) // hour_ns
        last = (re - t0 - 1) // hour_ns
        for h in range(first, last + 1):
            bucket_start = t0 + h * hour_ns
            overlap_ns = min(re, bucket_start + hour_ns) - max(rs, bucket_start)
            volume[h] += r.power_mw * (overlap_ns / hour_ns)

    return HourlyTarget(hours=hours, volume=volume)
