"""Synthetic study data: correlated grid/market series, a target with a
known functional form, matching intervention records, and offline
fixture bundles.

The target has three causal terms, so recovery is checkable end to end:
a linear wind term, a hinge on southern hydro generation (active below
1.2 GW, flat above), and a wind x Denmark-flow interaction. The other
catalog features are generated with realistic shapes but carry no causal
signal.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

from .data.assemble import StudyDataset, assemble
from .data.features import (
    CONTROL_AREAS,
    NEIGHBOURS,
    FeatureMatrix,
    base_matrix_from_series,
    engineer_features,
)
from .data.records import GERMAN_TSOS, InterventionRecord
from .data.target import HourlyTarget
from .ingest.redispatch import write_redispatch_csv
from .ingest.snapshot import study_requests
from .ingest.xmlparse import render_market_document

# target = WIND_COEF*wind_north + HYDRO_COEF*max(0, HYDRO_KNEE - hydro_south)
#          + CROSS_COEF*(wind_north/1000)*flow_DK + noise, clipped at 0
WIND_COEF = 0.042
HYDRO_COEF = 0.22
HYDRO_KNEE = 1200.0
CROSS_COEF = 0.004
DEFAULT_NOISE_SIGMA = 35.0

DEFAULT_START = datetime(2021, 3, 1, tzinfo=timezone.utc)


def _ar1(rng: np.random.Generator, n: int, phi: float = 0.97) -> np.ndarray:
    eps = rng.normal(size=n)
    out = np.empty(n)
    out[0] = eps[0] / np.sqrt(1 - phi * phi)
    for i in range(1, n):
        out[i] = phi * out[i - 1] + eps[i]
    return out * np.sqrt(1 - phi * phi)


def synthetic_series(window, seed: int = 0) -> dict[str, pd.Series]:
    """Every ingest-level series named by study_requests, hourly over window."""
    start, end = pd.Timestamp(window[0]), pd.Timestamp(window[1])
    idx = pd.date_range(start, end, freq="h", inclusive="left", tz="UTC")
    n = len(idx)
    rng = np.random.default_rng(seed)
    hod = idx.hour.to_numpy()
    doy = idx.dayofyear.to_numpy()
    weekday = np.asarray(idx.dayofweek < 5)

    def pos(x):
        return np.maximum(x, 0.0)

    w = _ar1(rng, n)  # common wind weather factor
    series: dict[str, pd.Series] = {}

    wind_levels = {"tennet": (5000, 3500), "50hertz": (4000, 2800),
                   "amprion": (1200, 900), "transnet": (500, 380)}
    for area, (mean, sd) in wind_levels.items():
        z = 0.8 * w + 0.6 * _ar1(rng, n)
        series[f"wind_on_{area}"] = pd.Series(pos(mean + sd * z), idx)
    series["wind_off_north_sea"] = pd.Series(pos(1800 + 1200 * (0.85 * w + 0.5 * _ar1(rng, n))), idx)
    series["wind_off_baltic"] = pd.Series(pos(900 + 700 * (0.85 * w + 0.5 * _ar1(rng, n))), idx)

    bell = np.clip(np.sin(np.pi * (hod - 6) / 12.0), 0.0, None) ** 2
    solar_season = 0.65 + 0.35 * np.sin(2 * np.pi * (doy - 80) / 365.0)
    solar_amp = {"50hertz": 2500, "amprion": 2800, "tennet": 3000, "transnet": 2200}
    for area, amp in solar_amp.items():
        jitter = 1.0 + 0.10 * _ar1(rng, n, 0.9)
        series[f"solar_{area}"] = pd.Series(pos(amp * bell * solar_season * jitter), idx)

    hydro_season = 1.0 + 0.45 * np.sin(2 * np.pi * (doy - 120) / 365.0)
    hydro_levels = {"tennet": (700, 250), "transnet": (500, 180),
                    "amprion": (450, 150), "50hertz": (60, 25)}
    for area, (mean, sd) in hydro_levels.items():
        z = _ar1(rng, n, 0.995)
        series[f"ror_hydro_{area}"] = pd.Series(pos(mean * hydro_season + sd * z), idx)

    load_base = {"50hertz": 7000, "amprion": 20000, "tennet": 12000, "transnet": 8000}
    profile = (1.0 + 0.12 * np.exp(-((hod - 9) / 3.0) ** 2)
               + 0.10 * np.exp(-((hod - 19) / 3.0) ** 2))
    day_factor = np.where(weekday, 1.0, 0.88)
    for area, base in load_base.items():
        z = _ar1(rng, n, 0.9)
        series[f"load_{area}"] = pd.Series(pos(base * profile * day_factor * (1 + 0.05 * z)), idx)

    for area in CONTROL_AREAS:
        wind_total = series[f"wind_on_{area}"].to_numpy().copy()
        if area == "tennet":
            wind_total = wind_total + series["wind_off_north_sea"].to_numpy()
        if area == "50hertz":
            wind_total = wind_total + series["wind_off_baltic"].to_numpy()
        rest = (0.55 * series[f"load_{area}"].to_numpy()
                - 0.25 * wind_total
                - 0.30 * series[f"solar_{area}"].to_numpy()
                + 2000.0 + 800.0 * _ar1(rng, n, 0.8))
        series[f"gen_rest_{area}"] = pd.Series(pos(rest), idx)

    flow_scale = {"AT": 900, "CH": 500, "CZ": 700, "DK": 700, "FR": 900,
                  "NL": 800, "PL": 600}
    for cc, scale in flow_scale.items():
        z = _ar1(rng, n, 0.95)
        flow = scale * z + (500.0 * w if cc == "DK" else 0.0)
        base_trade = 150.0
        out = pos(-flow) + base_trade
        series[f"exchange_out_{cc}"] = pd.Series(out, idx)
        series[f"exchange_in_{cc}"] = pd.Series(flow + out, idx)

    load_total = sum(series[f"load_{a}"].to_numpy() for a in CONTROL_AREAS)
    wind_north = (series["wind_on_tennet"].to_numpy() + series["wind_on_50hertz"].to_numpy()
                  + series["wind_off_north_sea"].to_numpy() + series["wind_off_baltic"].to_numpy())
    price_de = (45.0 - 0.0012 * wind_north + 0.0006 * (load_total - load_total.mean())
                + 4.0 * _ar1(rng, n, 0.9))
    series["price_DE"] = pd.Series(price_de, idx)
    price_offset = {"AT": 1.5, "CH": 4.0, "CZ": 3.0, "DK": -2.0, "FR": -1.0,
                    "NL": 0.5, "PL": 2.5}
    for cc in NEIGHBOURS:
        series[f"price_{cc}"] = pd.Series(
            price_de + price_offset[cc] + 3.0 * _ar1(rng, n, 0.9), idx)

    return series


def synthetic_volume(base: FeatureMatrix, seed: int = 1,
                     noise_sigma: float = DEFAULT_NOISE_SIGMA) -> pd.Series:
    """Hourly target from the known generator formula, in MWh."""
    eng = engineer_features(base, "engineered")
    wind = eng.frame["wind_north"].to_numpy()
    hydro = eng.frame["hydro_south"].to_numpy()
    flow_dk = eng.frame["flow_DK"].to_numpy()
    rng = np.random.default_rng(seed)
    vol = (WIND_COEF * wind
           + HYDRO_COEF * np.maximum(0.0, HYDRO_KNEE - hydro)
           + CROSS_COEF * (wind / 1000.0) * flow_dk
           + rng.normal(0.0, noise_sigma, size=len(wind)))
    return pd.Series(np.maximum(vol, 0.0), eng.frame.index, name="volume")


def synthetic_study(n_days: int = 120, seed: int = 0, feature_set: str = "reduced",
                    n_noise_features: int = 0,
                    noise_sigma: float = DEFAULT_NOISE_SIGMA) -> StudyDataset:
    """Model-ready dataset with the generator's causal structure."""
    start = pd.Timestamp(DEFAULT_START)
    window = (start, start + pd.Timedelta(days=n_days))
    series = synthetic_series(window, seed)
    base = base_matrix_from_series(series)
    volume = synthetic_volume(base, seed + 1, noise_sigma)
    features = engineer_features(base, feature_set)
    if n_noise_features:
        rng = np.random.default_rng(seed + 2)
        frame = features.frame.copy()
        for k in range(n_noise_features):
            frame[f"noise_{k}"] = rng.normal(0.0, 1000.0, size=len(frame))
        units = dict(features.units, **{f"noise_{k}": "MW" for k in range(n_noise_features)})
        features = FeatureMatrix(frame, units, features.feature_set)
    target = HourlyTarget(hours=volume.index, volume=volume.to_numpy())
    dataset, _ = assemble(target, features)
    return dataset


def records_for_volume(volume: pd.Series, seed: int = 3) -> list[InterventionRecord]:
    """Decompose an hourly volume series into plausible intervention records.

    Greedy: repeatedly carve hour-aligned records (1-6 h, random power
    share) out of the remaining per-hour volume. Cross-border
    countertrades are written at half power because completion later
    mirrors them. Reconstructed hourly magnitudes match the input to
    under ~0.5 MWh per hour.
    """
    rng = np.random.default_rng(seed)
    hours = volume.index
    residual = volume.to_numpy().astype(float).copy()
    n = len(residual)
    tso_pool = sorted(GERMAN_TSOS)
    records: list[InterventionRecord] = []

    for h in range(n):
        while residual[h] > 0.5:
            span = 1
            while (span < 6 and h + span < n and residual[h + span] > 0.5
                   and rng.random() < 0.6):
                span += 1
            avail = float(residual[h:h + span].min())
            power = avail * float(rng.uniform(0.4, 1.0))
            if power < 1.0:
                power = avail
            kind = rng.choice(["redispatch", "countertrade", "grid_reserve"],
                              p=[0.7, 0.2, 0.1])
            cross = bool(kind == "countertrade" and rng.random() < 0.5)
            effective = power
            if cross:
                power = power / 2.0
            tsos = frozenset(rng.choice(tso_pool,
                                        size=int(rng.integers(1, 3)), replace=False))
            records.append(InterventionRecord(
                start=hours[h].to_pydatetime(),
                end=(hours[h] + pd.Timedelta(hours=span)).to_pydatetime(),
                direction=str(rng.choice(["increase", "decrease"])),
                power_mw=float(power),
                kind=str(kind),
                reason="current",
                requesting_tsos=tsos,
                domestic_request=True,
                cross_border=cross,
                plant_id=f"plant_{int(rng.integers(100))}" if kind == "redispatch" else None,
            ))
            residual[h:h + span] -= effective
    return records


def decoy_records(window, seed: int = 4, n: int = 30) -> list[InterventionRecord]:
    """Records the filters must drop: foreign-only requests and voltage measures."""
    rng = np.random.default_rng(seed)
    start = pd.Timestamp(window[0])
    end = pd.Timestamp(window[1])
    max_start = int((end - start) / pd.Timedelta(hours=1)) - 6
    out = []
    for _ in range(n):
        h = int(rng.integers(0, max_start))
        span = int(rng.integers(1, 6))
        s = start + pd.Timedelta(hours=h)
        foreign = bool(rng.random() < 0.5)
        out.append(InterventionRecord(
            start=s.to_pydatetime(),
            end=(s + pd.Timedelta(hours=span)).to_pydatetime(),
            direction=str(rng.choice(["increase", "decrease"])),
            power_mw=float(rng.uniform(20, 300)),
            kind="redispatch",
            reason="current" if foreign else "voltage",
            requesting_tsos=frozenset(["APG"]) if foreign else frozenset(["tennet"]),
            domestic_request=not foreign,
            cross_border=False,
        ))
    return out


def random_intervention_records(n: int, window, seed: int = 0) -> list[InterventionRecord]:
    """Mixed record soup (sub-hour spans, all kinds/reasons) for pipeline tests."""
    rng = np.random.default_rng(seed)
    start = pd.Timestamp(window[0])
    end = pd.Timestamp(window[1])
    total_minutes = int((end - start) / pd.Timedelta(minutes=1))
    tso_pool = sorted(GERMAN_TSOS) + ["APG", "RTE"]
    out = []
    for _ in range(n):
        s_min = int(rng.integers(0, total_minutes - 30))
        dur_min = int(rng.integers(15, 12 * 60))
        dur_min = min(dur_min, total_minutes - s_min)
        s = start + pd.Timedelta(minutes=s_min)
        kind = str(rng.choice(["redispatch", "countertrade", "grid_reserve"],
                              p=[0.6, 0.3, 0.1]))
        tsos = frozenset(rng.choice(tso_pool, size=int(rng.integers(1, 3)),
                                    replace=False))
        out.append(InterventionRecord(
            start=s.to_pydatetime(),
            end=(s + pd.Timedelta(minutes=dur_min)).to_pydatetime(),
            direction=str(rng.choice(["increase", "decrease"])),
            power_mw=float(rng.uniform(5, 500)),
            kind=kind,
            reason=str(rng.choice(["current", "voltage", "other"], p=[0.8, 0.15, 0.05])),
            requesting_tsos=tsos,
            domestic_request=bool(tsos & GERMAN_TSOS),
            cross_border=bool(kind == "countertrade" and rng.random() < 0.4),
        ))
    return out


def write_fixture_bundle(fixtures_dir, window, seed: int = 0) -> Path:
    """Write a fully offline fixture set: one XML per study series plus a
    redispatch CSV whose aggregated volume follows the generator formula."""
    fixtures = Path(fixtures_dir)
    fixtures.mkdir(parents=True, exist_ok=True)
    series = synthetic_series(window, seed)
    for name, req in study_requests(window):
        xml = render_market_document(series[name], req.expected_unit())
        (fixtures / req.fixture_name()).write_text(xml, encoding="utf-8")

    base = base_matrix_from_series(series)
    volume = synthetic_volume(base, seed + 1)
    records = records_for_volume(volume, seed + 3) + decoy_records(window, seed + 4)
    records.sort(key=lambda r: (r.start, r.end, r.power_mw))
    write_redispatch_csv(records, fixtures / "redispatch.csv")
    return fixtures
