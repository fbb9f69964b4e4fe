"""Day-grouped shuffle split with a time gap around test hours.

Interventions span multiple hours, so plain row shuffling would leak the
same event into train and test. Whole calendar days (UTC) are shuffled
into folds and any training hour closer than the gap to a test hour is
discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..errors import InvalidInputError


@dataclass(frozen=True)
class GroupGapSplit:
    n_folds: int = 5
    gap_hours: float = 24.0
    seed: int = 0


def split(hours: pd.DatetimeIndex, cfg: GroupGapSplit) -> list[tuple[np.ndarray, np.ndarray]]:
    """Fold list of (train_indices, test_indices) into `hours`.

    Every hour lands in exactly one fold's test set; a fold's training
    set keeps only hours strictly farther than `gap_hours` from all of
    its test hours. Deterministic for a fixed seed.
    """
    if cfg.n_folds < 2:
        raise InvalidInputError("need at least 2 folds")
    if hours.tz is None:
        raise InvalidInputError("hours must be timezone-aware")
    days = hours.normalize()
    unique_days = days.unique().sort_values()
    if len(unique_days) < cfg.n_folds:
        raise InvalidInputError(
            f"need at least {cfg.n_folds} distinct days, got {len(unique_days)}"
        )

    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(unique_days))
    chunks = np.array_split(order, cfg.n_folds)

    day_code = unique_days.get_indexer(days)
    hour_ns = hours.asi8
    gap_ns = int(cfg.gap_hours * 3_600_000_000_000)

    folds = []
    for chunk in chunks:
        test_mask = np.isin(day_code, chunk)
        test_idx = np.nonzero(test_mask)[0]
        test_ns = np.sort(hour_ns[test_idx])
        cand_idx = np.nonzero(~test_mask)[0]
        pos = np.searchsorted(test_ns, hour_ns[cand_idx])
        dist_next = np.where(pos < len(test_ns),
                             test_ns[np.minimum(pos, len(test_ns) - 1)] - hour_ns[cand_idx],
                             np.iinfo(np.int64).max)
        dist_prev = np.where(pos > 0,
                             hour_ns[cand_idx] - test_ns[np.maximum(pos - 1, 0)],
                             np.iinfo(np.int64).max)
        keep = np.minimum(dist_next, dist_prev) > gap_ns
        folds.append((cand_idx[keep], test_idx))
    return folds


def check_gap(hours: pd.DatetimeIndex, folds, gap_hours: float) -> bool:
    """Exhaustive pairwise verification of the gap property."""
    gap_ns = int(gap_hours * 3_600_000_000_000)
    ns = hours.asi8
    for train_idx, test_idx in folds:
        if len(train_idx) == 0 or len(test_idx) == 0:
            continue
        d = np.abs(ns[train_idx][:, None] - ns[test_idx][None, :])
        if d.min() <= gap_ns:
            return False
    return True
