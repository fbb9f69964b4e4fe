from .cache import SeriesCache
from .client import AREA_CODES, EntsoeClient
from .redispatch import (
    parse_german_number,
    parse_local_time,
    parse_redispatch_csv,
    parse_redispatch_jsonl,
    write_redispatch_csv,
)
from .series import QUANTITIES, RawSeries, SeriesRequest
from .snapshot import load_manifest, read_normalized, snapshot, study_requests
from .xmlparse import hourly_points, parse_market_document, render_market_document

__all__ = [
    "AREA_CODES",
    "QUANTITIES",
    "EntsoeClient",
    "RawSeries",
    "SeriesCache",
    "SeriesRequest",
    "hourly_points",
    "load_manifest",
    "parse_german_number",
    "parse_local_time",
    "parse_market_document",
    "parse_redispatch_csv",
    "parse_redispatch_jsonl",
    "read_normalized",
    "render_market_document",
    "snapshot",
    "study_requests",
    "write_redispatch_csv",
]
