"""Transparency-platform client: live HTTP, disk cache, offline fixtures.

Live mode talks to the ENTSO-E restful API with token auth, bounded
retry on rate limits, and interval chunking. Fixture mode never touches
the network: requests resolve to XML files named by
``SeriesRequest.fixture_name()`` in a local directory.
"""

from __future__ import annotations

import time
from datetime import timedelta
from pathlib import Path
from typing import Callable, Optional

import pandas as pd

from ..errors import AuthError, FixtureMissingError, GridXaiError, RateLimitError
from .cache import SeriesCache
from .series import RawSeries, SeriesRequest
from .xmlparse import hourly_points, parse_market_document

API_URL = "https://web-api.tp.entsoe.eu/api"

# EIC codes for the areas this study touches. Offshore zones map to the
# control area whose grid connects them (psrType distinguishes the series).
AREA_CODES = {
    "50hertz": "10YDE-VE-------2",
    "amprion": "10YDE-RWENET---I",
    "tennet": "10YDE-EON------1",
    "transnet": "10YDE-ENBW-----N",
    "north_sea": "10YDE-EON------1",
    "baltic": "10YDE-VE-------2",
    "DE": "10Y1001A1001A82H",
    "AT": "10YAT-APG------L",
    "CH": "10YCH-SWISSGRIDZ",
    "CZ": "10YCZ-CEPS-----N",
    "DK": "10YDK-1--------W",
    "FR": "10YFR-RTE------C",
    "NL": "10YNL----------L",
    "PL": "10YPL-AREA-----S",
}

# documentType / processType / psrType per quantity (day-ahead variants);
# total_generation_fc is internal, used to derive other_generation_fc
_QUERY_PLAN = {
    "load_forecast": {"documentType": "A65", "processType": "A01"},
    "wind_onshore_fc": {"documentType": "A69", "processType": "A01", "psrType": "B19"},
    "wind_offshore_fc": {"documentType": "A69", "processType": "A01", "psrType": "B18"},
    "solar_fc": {"documentType": "A69", "processType": "A01", "psrType": "B16"},
    "ror_hydro_fc": {"documentType": "A71", "processType": "A01", "psrType": "B11"},
    "total_generation_fc": {"documentType": "A71", "processType": "A01"},
    "day_ahead_price": {"documentType": "A44"},
    "scheduled_exchange": {"documentType": "A09"},
}

# other_generation_fc = total generation forecast minus these
_NON_DISPATCHABLE = ("wind_onshore_fc", "wind_offshore_fc", "solar_fc", "ror_hydro_fc")


def _requests_transport(url: str, params: dict) -> tuple[int, bytes]:
    import requests

    resp = requests.get(url, params=params, timeout=60)
    return resp.status_code, resp.content


class EntsoeClient:
    def __init__(self, token: Optional[str] = None, cache_dir=None,
                 fixtures_dir=None, offline: bool = False,
                 transport: Optional[Callable] = None,
                 max_retries: int = 5, backoff_base: float = 1.0,
                 sleeper: Callable[[float], None] = time.sleep,
                 chunk_days: int = 90):
        self.token = token
        self.cache = SeriesCache(cache_dir) if cache_dir else None
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else None
        self.offline = offline or fixtures_dir is not None
        self.transport = transport
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.sleeper = sleeper
        self.chunk_days = chunk_days

    def fetch(self, req: SeriesRequest) -> RawSeries:
        if self.cache:
            hit = self.cache.get(req)
            if hit is not None:
                return hit
        if self.offline:
            series = self._fetch_fixture(req)
        else:
            series = self._fetch_live(req)
        series.validate()
        if self.cache:
            self.cache.put(series)
        return series

    # fixture mode ----------------------------------------------------------

    def _fetch_fixture(self, req: SeriesRequest) -> RawSeries:
        if self.fixtures_dir is None:
            raise FixtureMissingError(
                "offline mode without a fixtures directory; pass --fixtures"
            )
        path = self.fixtures_dir / req.fixture_name()
        if not path.exists():
            raise FixtureMissingError(f"fixture not found: {path}")
        periods, unit, no_data = parse_market_document(path.read_bytes())
        points = hourly_points(periods)
        points = [(t, v) for t, v in points if req.start_utc <= t < req.end_utc]
        return RawSeries(
            request=req,
            points=points,
            unit=unit or req.expected_unit(),
            source="fixture",
            fetched_at="",
            complete=not no_data and len(points) > 0,
        )

    # live mode -------------------------------------------------------------

    def _build_params(self, quantity: str, area: str, counterparty=None) -> dict:
        plan = dict(_QUERY_PLAN[quantity])
        code = AREA_CODES.get(area, area)
        params = {"securityToken": self.token, **plan}
        if quantity == "scheduled_exchange":
            params["in_Domain"] = AREA_CODES.get(counterparty, counterparty)
            params["out_Domain"] = code
        elif quantity == "day_ahead_price":
            params["in_Domain"] = code
            params["out_Domain"] = code
        elif quantity == "load_forecast":
            params["outBiddingZone_Domain"] = code
        else:
            params["in_Domain"] = code
        return params

    def _http(self, params: dict) -> bytes:
        transport = self.transport or _requests_transport
        delay = self.backoff_base
        for attempt in range(self.max_retries):
            status, content = transport(API_URL, params)
            if status in (401, 403):
                raise AuthError(f"authentication failed (HTTP {status})")
            if status == 429:
                if attempt == self.max_retries - 1:
                    break
                self.sleeper(delay)
                delay *= 2
                continue
            if status != 200:
                raise GridXaiError(f"unexpected HTTP {status} from API")
            return content
        raise RateLimitError(f"rate limited after {self.max_retries} attempts")

    def _collect(self, quantity: str, area: str, counterparty,
                 start: pd.Timestamp, end: pd.Timestamp) -> tuple[list, str, bool]:
        """Chunked retrieval of one document family, merged to hourly points."""
        if not self.token:
            raise AuthError("live mode requires an API token")
        params = self._build_params(quantity, area, counterparty)
        dedup: dict = {}
        unit = ""
        any_data = False
        cursor = start
        while cursor < end:
            stop = min(cursor + timedelta(days=self.chunk_days), end)
            chunk = dict(params,
                         periodStart=cursor.strftime("%Y%m%d%H%M"),
                         periodEnd=stop.strftime("%Y%m%d%H%M"))
            periods, chunk_unit, no_data = parse_market_document(self._http(chunk))
            if not no_data:
                any_data = True
                unit = chunk_unit or unit
                dedup.update(dict(hourly_points(periods)))
            cursor = stop
        merged = [(t, v) for t, v in sorted(dedup.items()) if start <= t < end]
        return merged, unit, any_data

    def _fetch_live(self, req: SeriesRequest) -> RawSeries:
        fetched_at = pd.Timestamp.utcnow().isoformat()
        if req.quantity == "other_generation_fc":
            points, _, any_data = self._collect(
                "total_generation_fc", req.area, None, req.start_utc, req.end_utc
            )
            remainder = pd.Series(dict(points), dtype=float)
            for quantity in _NON_DISPATCHABLE:
                sub = self.fetch(SeriesRequest(quantity, req.area, req.start, req.end))
                remainder = remainder.sub(sub.to_series(), fill_value=0.0)
            merged = [(t, float(v)) for t, v in remainder.sort_index().items()]
            return RawSeries(req, merged, "MW", "live", fetched_at,
                             complete=any_data and len(merged) > 0)

        merged, unit, any_data = self._collect(
            req.quantity, req.area, req.counterparty, req.start_utc, req.end_utc
        )
        return RawSeries(
            request=req,
            points=merged,
            unit=unit or req.expected_unit(),
            source="live",
            fetched_at=fetched_at,
            complete=any_data and len(merged) > 0,
        )
