"""Series request/response types for the transparency-platform client."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

import pandas as pd

from ..errors import InvalidInputError

QUANTITIES = (
    "load_forecast",
    "wind_onshore_fc",
    "wind_offshore_fc",
    "solar_fc",
    "ror_hydro_fc",
    "other_generation_fc",
    "scheduled_exchange",
    "day_ahead_price",
)

_POWER_QUANTITIES = set(QUANTITIES) - {"day_ahead_price"}


def _check_hour(ts, label: str) -> pd.Timestamp:
    t = pd.Timestamp(ts)
    if t.tzinfo is None:
        raise InvalidInputError(f"{label} must be timezone-aware")
    t = t.tz_convert("UTC")
    if t != t.floor("h"):
        raise InvalidInputError(f"{label} must be hour-aligned: {ts}")
    return t


@dataclass(frozen=True)
class SeriesRequest:
    quantity: str
    area: str
    start: datetime
    end: datetime
    counterparty: Optional[str] = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise InvalidInputError(f"unknown quantity: {self.quantity!r}")
        s = _check_hour(self.start, "start")
        e = _check_hour(self.end, "end")
        if e <= s:
            raise InvalidInputError("request end must be after start")
        if (self.counterparty is None) == (self.quantity == "scheduled_exchange"):
            raise InvalidInputError(
                "counterparty is required for scheduled_exchange and forbidden otherwise"
            )

    @property
    def start_utc(self) -> pd.Timestamp:
        return pd.Timestamp(self.start).tz_convert("UTC")

    @property
    def end_utc(self) -> pd.Timestamp:
        return pd.Timestamp(self.end).tz_convert("UTC")

    def canonical(self) -> str:
        return json.dumps({
            "quantity": self.quantity,
            "area": self.area,
            "counterparty": self.counterparty,
            "start": self.start_utc.isoformat(),
            "end": self.end_utc.isoformat(),
        }, sort_keys=True)

    def cache_key(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:32]

    def fixture_name(self) -> str:
        parts = [self.quantity, self.area]
        if self.counterparty:
            parts.append(self.counterparty)
        parts.append(self.start_utc.strftime("%Y%m%dT%H"))
        parts.append(self.end_utc.strftime("%Y%m%dT%H"))
        return "_".join(parts) + ".xml"

    def expected_unit(self) -> str:
        return "EUR/MWh" if self.quantity == "day_ahead_price" else "MW"

    def to_dict(self) -> dict:
        return json.loads(self.canonical())

    @classmethod
    def from_dict(cls, d: dict) -> "SeriesRequest":
        return cls(
            quantity=d["quantity"],
            area=d["area"],
            start=pd.Timestamp(d["start"]).to_pydatetime(),
            end=pd.Timestamp(d["end"]).to_pydatetime(),
            counterparty=d.get("counterparty"),
        )


@dataclass
class RawSeries:
    request: SeriesRequest
    points: list                 # [(pd.Timestamp UTC hour, float value), ...] sorted
    unit: str
    source: str                  # live | cache | fixture
    fetched_at: str = ""         # ISO time for live fetches, "" when deterministic
    complete: bool = True        # False when the provider returned no/partial data

    def to_series(self) -> pd.Series:
        if not self.points:
            idx = pd.DatetimeIndex([], tz="UTC")
            return pd.Series([], index=idx, dtype=float, name=self.request.quantity)
        idx = pd.DatetimeIndex([p[0] for p in self.points])
        return pd.Series([p[1] for p in self.points], index=idx, name=self.request.quantity)

    def validate(self) -> None:
        hours = [p[0] for p in self.points]
        if any(h != h.floor("h") for h in hours):
            raise InvalidInputError("series contains non hour-aligned points")
        if sorted(hours) != hours or len(set(hours)) != len(hours):
            raise InvalidInputError("series points must be sorted and unique")

    def to_json(self) -> str:
        return json.dumps({
            "request": self.request.to_dict(),
            "unit": self.unit,
            "source": self.source,
            "fetched_at": self.fetched_at,
            "complete": self.complete,
            "points": [[ts.strftime("%Y-%m-%dT%H:%M:%SZ"), float(v)] for ts, v in self.points],
        })

    @classmethod
    def from_json(cls, s: str) -> "RawSeries":
        d = json.loads(s)
        return cls(
            request=SeriesRequest.from_dict(d["request"]),
            points=[(pd.Timestamp(ts), float(v)) for ts, v in d["points"]],
            unit=d["unit"],
            source=d["source"],
            fetched_at=d.get("fetched_at", ""),
            complete=d.get("complete", True),
        )
