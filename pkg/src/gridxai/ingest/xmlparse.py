"""Parse and render transparency-platform style market documents.

The documents of interest are TimeSeries/Period/Point structures with a
position-indexed value list per period. Parsing is namespace-agnostic so
the several document flavours (generation/load, publication, balancing)
all work; an Acknowledgement document means "no data for this interval".
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..errors import ParseError

_RESOLUTIONS = {"PT15M": 15, "PT30M": 30, "PT60M": 60, "P1D": 1440}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _find_text(elem, name):
    for child in elem.iter():
        if _local(child.tag) == name:
            return child.text
    return None


@dataclass
class PeriodData:
    start: pd.Timestamp
    resolution_minutes: int
    values: dict                  # position -> value


def parse_market_document(data: bytes) -> tuple[list[PeriodData], str, bool]:
    """Returns (periods, unit, no_data_flag)."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        offset = sum(len(l) + 1 for l in data.split(b"\n")[: line - 1]) + col
        raise ParseError(f"malformed XML at byte {offset}: {exc}", byte_offset=offset) from exc

    if _local(root.tag) == "Acknowledgement_MarketDocument":
        return [], "", True

    unit = ""
    periods: list[PeriodData] = []
    for ts in root.iter():
        if _local(ts.tag) != "TimeSeries":
            continue
        ts_unit = (_find_text(ts, "quantity_Measure_Unit.name")
                   or _find_text(ts, "price_Measure_Unit.name")
                   or _find_text(ts, "currency_Unit.name"))
        if ts_unit:
            unit = {"MAW": "MW", "MWH": "MWh", "EUR": "EUR/MWh"}.get(ts_unit, ts_unit)
        for period in ts.iter():
            if _local(period.tag) != "Period":
                continue
            start_text = None
            for child in period:
                if _local(child.tag) == "timeInterval":
                    start_text = _find_text(child, "start")
            res_text = _find_text(period, "resolution")
            if start_text is None or res_text is None:
                raise ParseError("Period without timeInterval/resolution")
            if res_text not in _RESOLUTIONS:
                raise ParseError(f"unsupported resolution: {res_text}")
            values: dict[int, float] = {}
            for point in period.iter():
                if _local(point.tag) != "Point":
                    continue
                pos = _find_text(point, "position")
                val = _find_text(point, "quantity")
                if val is None:
                    val = _find_text(point, "price.amount")
                if pos is None or val is None:
                    raise ParseError("Point without position/value")
                values[int(pos)] = float(val)
            periods.append(PeriodData(
                start=pd.Timestamp(start_text).tz_convert("UTC"),
                resolution_minutes=_RESOLUTIONS[res_text],
                values=values,
            ))
    return periods, unit, False


def hourly_points(periods: list[PeriodData]) -> list:
    """Expand periods to timestamps and mean-aggregate to the hour.

    Sub-hourly points within one hour are averaged; a later period wins
    when two periods cover the same hour.
    """
    buckets: dict[pd.Timestamp, list] = {}
    for k, p in enumerate(periods):
        step = pd.Timedelta(minutes=p.resolution_minutes)
        for pos, val in p.values.items():
            t = p.start + (pos - 1) * step
            buckets.setdefault(t.floor("h"), []).append((k, t, val))
    out = []
    for hour in sorted(buckets):
        entries = buckets[hour]
        last_period = max(k for k, _, _ in entries)
        vals = [v for k, _, v in entries if k == last_period]
        out.append((hour, float(np.mean(vals))))
    return out


def render_market_document(series: pd.Series, unit: str,
                           resolution_minutes: int = 60,
                           document_type: str = "GL_MarketDocument") -> str:
    """Render points as a minimal market document (used for fixtures)."""
    if series.empty:
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            "<Acknowledgement_MarketDocument><Reason><code>999</code>"
            "<text>No matching data found</text></Reason></Acknowledgement_MarketDocument>\n"
        )
    idx = series.index.tz_convert("UTC")
    start = idx[0]
    end = idx[-1] + pd.Timedelta(minutes=resolution_minutes)
    unit_tag = ("price_Measure_Unit.name" if unit == "EUR/MWh"
                else "quantity_Measure_Unit.name")
    unit_value = {"MW": "MAW", "EUR/MWh": "EUR"}.get(unit, unit)
    value_tag = "price.amount" if unit == "EUR/MWh" else "quantity"
    res_name = {15: "PT15M", 30: "PT30M", 60: "PT60M"}[resolution_minutes]
    step = pd.Timedelta(minutes=resolution_minutes)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<{document_type}>",
        "  <TimeSeries>",
        f"    <{unit_tag}>{unit_value}</{unit_tag}>",
        "    <Period>",
        "      <timeInterval>",
        f"        <start>{start.strftime('%Y-%m-%dT%H:%MZ')}</start>",
        f"        <end>{end.strftime('%Y-%m-%dT%H:%MZ')}</end>",
        "      </timeInterval>",
        f"      <resolution>{res_name}</resolution>",
    ]
    for i, (ts, val) in enumerate(series.items()):
        expected = start + i * step
        if ts != expected:
            raise ParseError(f"fixture series must be contiguous; gap at {ts}")
        lines.append(f"      <Point><position>{i + 1}</position>"
                     f"<{value_tag}>{repr(float(val))}</{value_tag}></Point>")
    lines += ["    </Period>", "  </TimeSeries>", f"</{document_type}>", ""]
    return "\n".join(lines)
