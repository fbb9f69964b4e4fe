"""Intervention records and the record-level preprocessing steps."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Iterable, Optional

from ..errors import InvalidInputError

DIRECTIONS = ("increase", "decrease")
KINDS = ("redispatch", "countertrade", "grid_reserve")
REASONS = ("current", "voltage", "other")

GERMAN_TSOS = frozenset({"50hertz", "amprion", "tennet", "transnet"})


@dataclass(frozen=True)
class InterventionRecord:
    start: datetime
    end: datetime
    direction: str                 # increase | decrease
    power_mw: float                # mean power over the span
    kind: str                      # redispatch | countertrade | grid_reserve
    reason: str                    # current | voltage | other
    requesting_tsos: frozenset
    domestic_request: bool         # any German TSO requested it
    cross_border: bool
    plant_id: Optional[str] = None
    synthetic: bool = False        # added by cross-border completion

    def __post_init__(self):
        if self.start.tzinfo is None or self.end.tzinfo is None:
            raise InvalidInputError("record timestamps must be timezone-aware")
        if self.end <= self.start:
            raise InvalidInputError(f"record end {self.end} not after start {self.start}")
        if not math.isfinite(self.power_mw) or self.power_mw < 0:
            raise InvalidInputError(f"invalid power: {self.power_mw}")
        if self.direction not in DIRECTIONS:
            raise InvalidInputError(f"unknown direction: {self.direction!r}")
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown kind: {self.kind!r}")
        if self.reason not in REASONS:
            raise InvalidInputError(f"unknown reason: {self.reason!r}")

    @property
    def duration_hours(self) -> float:
        return (self.end - self.start).total_seconds() / 3600.0

    @property
    def energy_mwh(self) -> float:
        return self.power_mw * self.duration_hours


def filter_records(records: Iterable[InterventionRecord]) -> list[InterventionRecord]:
    """Keep domestic, current-related interventions.

    Records requested solely by foreign TSOs did not relieve German
    congestion and are dropped, as are voltage-related measures. Grid
    reserve activations pass through: they are current-related domestic
    interventions like any other.
    """
    return [r for r in records if r.domestic_request and r.reason == "current"]


def _mirror_key(r: InterventionRecord) -> tuple:
    opposite = "decrease" if r.direction == "increase" else "increase"
    return (r.start, r.end, opposite, r.power_mw, r.kind)


def _key(r: InterventionRecord) -> tuple:
    return (r.start, r.end, r.direction, r.power_mw, r.kind)


def complete_cross_border(records: Iterable[InterventionRecord]) -> list[InterventionRecord]:
    """Add the unreported opposite side of every cross-border countertrade.

    Only the German half of a cross-border countertrade is published, so
    an equal-power, opposite-direction synthetic record is appended for
    each one. Idempotent: a countertrade whose mirror is already present
    as a synthetic record is not mirrored again.
    """
    records = list(records)
    available = Counter(_key(r) for r in records if r.synthetic)
    out = list(records)
    for r in records:
        if r.synthetic or r.kind != "countertrade" or not r.cross_border:
            continue
        key = _mirror_key(r)
        if available[key] > 0:
            available[key] -= 1
            continue
        out.append(replace(
            r,
            direction="decrease" if r.direction == "increase" else "increase",
            plant_id=None,
            synthetic=True,
        ))
    return out
