"""Parser for the public redispatch/countertrade download.

The published file is a semicolon-separated CSV with German decimal
commas and DD.MM.YYYY HH:MM timestamps in local (Europe/Berlin) time.
On the fall-back day the doubled hour carries an A/B suffix for the
first/second occurrence. Rows carry either a mean power in MW or a total
energy in MWh; energy is converted to mean power over the span.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from zoneinfo import ZoneInfo

import pandas as pd

from ..data.records import GERMAN_TSOS, InterventionRecord
from ..errors import GridXaiError, InvalidInputError, SchemaMismatchError

BERLIN = ZoneInfo("Europe/Berlin")

COL_START = "Beginn"
COL_END = "Ende"
COL_REASON = "Grund der Massnahme"
COL_DIRECTION = "Richtung"
COL_POWER = "Mittlere Leistung [MW]"
COL_ENERGY = "Gesamte Arbeit [MWh]"
COL_KIND = "Massnahme"
COL_TSOS = "Anfordernder UENB"
COL_PLANT = "Betroffene Anlage"
COL_XBORDER = "Grenzueberschreitend"

MANDATORY = (COL_START, COL_END, COL_REASON, COL_DIRECTION, COL_KIND, COL_TSOS)

_TSO_NAMES = {
    "50hertz": "50hertz",
    "amprion": "amprion",
    "tennet": "tennet",
    "transnet": "transnet",
}

_KIND_MAP = {
    "redispatch": "redispatch",
    "countertrading": "countertrade",
    "countertrade": "countertrade",
    "netzreserve": "grid_reserve",
}


def parse_local_time(text: str) -> datetime:
    """DD.MM.YYYY HH:MM German local time, optional A/B fall-back suffix, to UTC."""
    text = text.strip()
    fold = 0
    if text and text[-1] in ("A", "B"):
        fold = 0 if text[-1] == "A" else 1
        text = text[:-1].strip()
    naive = datetime.strptime(text, "%d.%m.%Y %H:%M")
    local = naive.replace(tzinfo=BERLIN, fold=fold)
    utc = local.astimezone(timezone.utc)
    if utc.astimezone(BERLIN).replace(tzinfo=None) != naive:
        raise InvalidInputError(f"nonexistent local time (DST spring forward): {text}")
    return utc


def format_local_time(ts: datetime) -> str:
    """Inverse of parse_local_time; emits the A/B suffix on ambiguous hours."""
    local = pd.Timestamp(ts).tz_convert(BERLIN)
    naive = local.tz_localize(None)
    suffix = ""
    as_a = naive.to_pydatetime().replace(tzinfo=BERLIN, fold=0).astimezone(timezone.utc)
    as_b = naive.to_pydatetime().replace(tzinfo=BERLIN, fold=1).astimezone(timezone.utc)
    if as_a != as_b:  # ambiguous wall time
        suffix = "A" if local.to_pydatetime().astimezone(timezone.utc) == as_a else "B"
    return naive.strftime("%d.%m.%Y %H:%M") + suffix


def parse_german_number(text: str) -> float:
    cleaned = text.strip().replace(".", "").replace(",", ".")
    if cleaned == "":
        raise InvalidInputError("empty numeric field")
    return float(cleaned)


def format_german_number(value: float) -> str:
    return f"{value:.3f}".replace(".", ",")


def _map_reason(text: str) -> str:
    t = text.strip().lower()
    if t.startswith("strombedingt"):
        return "current"
    if t.startswith("spannungsbedingt"):
        return "voltage"
    return "other"


def _map_direction(text: str) -> str:
    t = text.strip().lower()
    if "reduzieren" in t:
        return "decrease"
    if "erhöhen" in t or "erhoehen" in t:
        return "increase"
    raise InvalidInputError(f"unknown direction: {text!r}")


def _map_kind(text: str) -> str:
    t = text.strip().lower()
    if t in _KIND_MAP:
        return _KIND_MAP[t]
    raise InvalidInputError(f"unknown measure kind: {text!r}")


def _map_tsos(text: str) -> frozenset:
    out = set()
    for part in text.split(","):
        name = part.strip()
        if not name:
            continue
        low = name.lower()
        matched = None
        for key, canonical in _TSO_NAMES.items():
            if key in low:
                matched = canonical
                break
        out.add(matched if matched else name)
    return frozenset(out)


def parse_redispatch_csv(data) -> tuple[list[InterventionRecord], list[dict]]:
    """Parse the download; returns (records, rejects).

    Unparseable rows land in the rejects report with their row number and
    error; parsing continues. A missing mandatory column is fatal.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    reader = csv.DictReader(io.StringIO(data), delimiter=";")
    if reader.fieldnames is None:
        return [], []
    fields = [f.strip() for f in reader.fieldnames]
    missing = [c for c in MANDATORY if c not in fields]
    if missing:
        raise SchemaMismatchError(f"redispatch CSV lacks mandatory column(s): {missing}")
    if COL_POWER not in fields and COL_ENERGY not in fields:
        raise SchemaMismatchError(
            f"redispatch CSV needs {COL_POWER!r} or {COL_ENERGY!r}"
        )

    records: list[InterventionRecord] = []
    rejects: list[dict] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            row = {(k or "").strip(): (v or "").strip() for k, v in row.items()}
            start = parse_local_time(row[COL_START])
            end = parse_local_time(row[COL_END])
            power_text = row.get(COL_POWER, "")
            if power_text:
                power = parse_german_number(power_text)
            else:
                energy = parse_german_number(row.get(COL_ENERGY, ""))
                duration_h = (end - start).total_seconds() / 3600.0
                if duration_h <= 0:
                    raise InvalidInputError("non-positive duration")
                power = energy / duration_h
            tsos = _map_tsos(row[COL_TSOS])
            records.append(InterventionRecord(
                start=start,
                end=end,
                direction=_map_direction(row[COL_DIRECTION]),
                power_mw=power,
                kind=_map_kind(row[COL_KIND]),
                reason=_map_reason(row[COL_REASON]),
                requesting_tsos=tsos,
                domestic_request=bool(tsos & GERMAN_TSOS),
                cross_border=row.get(COL_XBORDER, "").strip().lower() in ("ja", "yes", "true", "1"),
                plant_id=row.get(COL_PLANT) or None,
            ))
        except (GridXaiError, ValueError, KeyError) as exc:
            rejects.append({"row": line_no, "error": str(exc)})
    return records, rejects


_DIRECTION_DE = {
    "decrease": "Wirkleistungseinspeisung reduzieren",
    "increase": "Wirkleistungseinspeisung erhoehen",
}
_KIND_DE = {"redispatch": "Redispatch", "countertrade": "Countertrading",
            "grid_reserve": "Netzreserve"}
_REASON_DE = {"current": "Strombedingter Redispatch",
              "voltage": "Spannungsbedingter Redispatch", "other": "Sonstiges"}
_TSO_DE = {"50hertz": "50Hertz Transmission", "amprion": "Amprion",
           "tennet": "TenneT TSO", "transnet": "TransnetBW"}


def write_redispatch_csv(records, path) -> None:
    """Render records in the download's format (fixtures and demos)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=";")
        w.writerow([COL_START, COL_END, COL_REASON, COL_DIRECTION, COL_POWER,
                    COL_KIND, COL_TSOS, COL_PLANT, COL_XBORDER])
        for r in records:
            if r.synthetic:
                continue  # completion re-derives these
            tsos = ", ".join(sorted(_TSO_DE.get(t, t) for t in r.requesting_tsos))
            w.writerow([
                format_local_time(r.start),
                format_local_time(r.end),
                _REASON_DE[r.reason],
                _DIRECTION_DE[r.direction],
                format_german_number(r.power_mw),
                _KIND_DE[r.kind],
                tsos,
                r.plant_id or "",
                "ja" if r.cross_border else "nein",
            ])


def parse_redispatch_jsonl(data) -> tuple[list[InterventionRecord], list[dict]]:
    """Normalized JSON-lines alternative: ISO timestamps, English enums."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    records: list[InterventionRecord] = []
    rejects: list[dict] = []
    for line_no, line in enumerate(data.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            d = json.loads(line)
            tsos = frozenset(d.get("requesting_tsos", []))
            records.append(InterventionRecord(
                start=pd.Timestamp(d["start"]).to_pydatetime(),
                end=pd.Timestamp(d["end"]).to_pydatetime(),
                direction=d["direction"],
                power_mw=float(d["power_mw"]),
                kind=d["kind"],
                reason=d.get("reason", "current"),
                requesting_tsos=tsos,
                domestic_request=d.get("domestic_request", bool(tsos & GERMAN_TSOS)),
                cross_border=bool(d.get("cross_border", False)),
                plant_id=d.get("plant_id"),
                synthetic=bool(d.get("synthetic", False)),
            ))
        except (GridXaiError, ValueError, KeyError) as exc:
            rejects.append({"row": line_no, "error": str(exc)})
    return records, rejects
