"""CSV export of attributions and interaction values."""

from __future__ import annotations

import csv

import numpy as np
import pandas as pd

from ..errors import InvalidInputError
from .treeshap import InteractionResult, ShapResult


def _format_timestamps(index, n: int) -> list[str]:
    if index is None:
        return [str(i) for i in range(n)]
    if isinstance(index, pd.DatetimeIndex):
        idx = index.tz_convert("UTC") if index.tz is not None else index.tz_localize("UTC")
        out = [ts.strftime("%Y-%m-%dT%H:%M:%SZ") for ts in idx]
    else:
        out = [str(v) for v in index]
    if len(out) != n:
        raise InvalidInputError("timestamp index length does not match sample count")
    return out


def write_attributions_csv(s: ShapResult, path, index=None) -> None:
    """One row per sample: timestamp,base_value,<feature>..."""
    stamps = _format_timestamps(index, s.n_samples)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "base_value", *s.feature_names])
        for i, ts in enumerate(stamps):
            w.writerow([ts, repr(float(s.base_value)), *(repr(float(v)) for v in s.values[i])])


def write_interactions_csv(ir: InteractionResult, path, index=None) -> None:
    """Long form: timestamp,feature_a,feature_b,value (upper triangle incl. diagonal)."""
    n = ir.values.shape[0]
    stamps = _format_timestamps(index, n)
    names = ir.feature_names
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "feature_a", "feature_b", "value"])
        for i, ts in enumerate(stamps):
            for a in range(len(names)):
                for b in range(a, len(names)):
                    w.writerow([ts, names[a], names[b], repr(float(ir.values[i, a, b]))])


def read_attributions_csv(path) -> ShapResult:
    """Inverse of write_attributions_csv (timestamps are not retained)."""
    frame = pd.read_csv(path, float_precision="round_trip")
    feature_names = [c for c in frame.columns if c not in ("timestamp", "base_value")]
    return ShapResult(
        base_value=float(frame["base_value"].iloc[0]),
        values=frame[feature_names].to_numpy(dtype=np.float64),
        feature_names=feature_names,
    )
