"""Reproducible on-disk bundles of everything a study run needs.

A bundle is a directory with ``manifest.json``, ``raw/`` (one JSON per
series, the cache format) and ``normalized/*.csv`` (hour_utc,value,unit).
The manifest carries content hashes so downstream steps can verify what
they read; nothing in the bundle embeds wall-clock time, so re-snapshots
from fixtures are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import pandas as pd

from ..data.features import CONTROL_AREAS, NEIGHBOURS, OFFSHORE_ZONES
from ..errors import GridXaiError
from .client import EntsoeClient
from .series import RawSeries, SeriesRequest

MANIFEST_VERSION = "1"

_AREA_QUANTITIES = (
    ("load", "load_forecast"),
    ("wind_on", "wind_onshore_fc"),
    ("solar", "solar_fc"),
    ("ror_hydro", "ror_hydro_fc"),
    ("gen_rest", "other_generation_fc"),
)


def study_requests(window) -> list[tuple[str, SeriesRequest]]:
    """Named series requests covering the full base feature catalog.

    Flows come as directional pairs (exchange_in/out) netted at build
    time; prices include the German zone for the difference features.
    """
    start, end = window
    out: list[tuple[str, SeriesRequest]] = []
    for area in CONTROL_AREAS:
        for prefix, quantity in _AREA_QUANTITIES:
            out.append((f"{prefix}_{area}", SeriesRequest(quantity, area, start, end)))
    for zone in OFFSHORE_ZONES:
        out.append((f"wind_off_{zone}", SeriesRequest("wind_offshore_fc", zone, start, end)))
    out.append(("price_DE", SeriesRequest("day_ahead_price", "DE", start, end)))
    for cc in NEIGHBOURS:
        out.append((f"price_{cc}", SeriesRequest("day_ahead_price", cc, start, end)))
        out.append((f"exchange_in_{cc}",
                    SeriesRequest("scheduled_exchange", "DE", start, end, counterparty=cc)))
        out.append((f"exchange_out_{cc}",
                    SeriesRequest("scheduled_exchange", cc, start, end, counterparty="DE")))
    return out


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _normalized_csv(series: RawSeries) -> str:
    lines = ["hour_utc,value,unit"]
    for ts, v in series.points:
        lines.append(f"{ts.strftime('%Y-%m-%dT%H:%M:%SZ')},{repr(float(v))},{series.unit}")
    return "\n".join(lines) + "\n"


def snapshot(client: EntsoeClient, requests: list, bundle_dir) -> dict:
    """Fetch every request and write the bundle; returns the manifest.

    Failures don't abort the snapshot: the failing series is recorded
    under ``gaps`` and the manifest is flagged incomplete.
    """
    bundle = Path(bundle_dir)
    (bundle / "raw").mkdir(parents=True, exist_ok=True)
    (bundle / "normalized").mkdir(parents=True, exist_ok=True)

    entries = []
    gaps = []
    for name, req in requests:
        try:
            series = client.fetch(req)
        except GridXaiError as exc:
            gaps.append({"name": name, "request": req.to_dict(), "error": str(exc)})
            continue
        raw_path = bundle / "raw" / f"{name}.json"
        stored = RawSeries(series.request, series.points, series.unit,
                           series.source, fetched_at="", complete=series.complete)
        _write_atomic(raw_path, stored.to_json())
        norm_path = bundle / "normalized" / f"{name}.csv"
        _write_atomic(norm_path, _normalized_csv(series))
        entries.append({
            "name": name,
            "request": req.to_dict(),
            "raw": f"raw/{name}.json",
            "normalized": f"normalized/{name}.csv",
            "sha256": _sha256(norm_path),
            "n_points": len(series.points),
            "complete": series.complete,
        })

    manifest = {
        "format_version": MANIFEST_VERSION,
        "series": entries,
        "gaps": gaps,
        "incomplete": bool(gaps) or any(not e["complete"] for e in entries),
    }
    _write_atomic(bundle / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
    return manifest


def load_manifest(bundle_dir) -> dict:
    path = Path(bundle_dir) / "manifest.json"
    if not path.exists():
        raise GridXaiError(f"no manifest.json in {bundle_dir}")
    return json.loads(path.read_text(encoding="utf-8"))


def read_normalized(bundle_dir, name: str) -> pd.Series:
    path = Path(bundle_dir) / "normalized" / f"{name}.csv"
    if not path.exists():
        raise GridXaiError(f"bundle series missing: {name}")
    frame = pd.read_csv(path, float_precision="round_trip")
    idx = pd.DatetimeIndex(pd.to_datetime(frame["hour_utc"], utc=True))
    return pd.Series(frame["value"].to_numpy(dtype=float), index=idx, name=name)
