"""Day-ahead feature catalog and engineered features.

Base features cover the four German control areas (load, onshore wind,
solar, run-of-river hydro, remaining dispatchable generation), the two
offshore wind zones, and per-neighbour net scheduled flows, prices and
price differences versus the German bidding zone. 50Hertz run-of-river
hydro is recorded in the raw data but excluded from every emitted
feature set: in exploration it only mirrors a spurious correlation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..errors import InvalidInputError, SchemaMismatchError

CONTROL_AREAS = ("50hertz", "amprion", "tennet", "transnet")
OFFSHORE_ZONES = ("north_sea", "baltic")
NEIGHBOURS = ("AT", "CH", "CZ", "DK", "FR", "NL", "PL")

FEATURE_SETS = ("full", "engineered", "reduced")

# which raw wind columns feed each control area's total wind generation
AREA_WIND = {
    "50hertz": ("wind_on_50hertz", "wind_off_baltic"),
    "amprion": ("wind_on_amprion",),
    "tennet": ("wind_on_tennet", "wind_off_north_sea"),
    "transnet": ("wind_on_transnet",),
}

WIND_NORTH_PARTS = ("wind_on_tennet", "wind_on_50hertz", "wind_off_north_sea", "wind_off_baltic")
HYDRO_SOUTH_PARTS = ("ror_hydro_tennet", "ror_hydro_transnet")
EXCLUDED_ALWAYS = ("ror_hydro_50hertz",)

REDUCED_FEATURES = (
    "wind_north",
    "hydro_south",
    "flow_DK",
    "flow_FR",
    "solar_DE",
    "residual_load_transnet",
)


def base_columns() -> dict[str, str]:
    """Raw base columns and units, as produced by ingest (incl. 50Hertz hydro)."""
    cols: dict[str, str] = {}
    for area in CONTROL_AREAS:
        cols[f"load_{area}"] = "MW"
        cols[f"wind_on_{area}"] = "MW"
        cols[f"solar_{area}"] = "MW"
        cols[f"ror_hydro_{area}"] = "MW"
        cols[f"gen_rest_{area}"] = "MW"
    for zone in OFFSHORE_ZONES:
        cols[f"wind_off_{zone}"] = "MW"
    for cc in NEIGHBOURS:
        cols[f"flow_{cc}"] = "MW"
        cols[f"price_{cc}"] = "EUR/MWh"
        cols[f"price_diff_{cc}"] = "EUR/MWh"
    return cols


def full_feature_names() -> list[str]:
    return [c for c in base_columns() if c not in EXCLUDED_ALWAYS]


@dataclass
class FeatureMatrix:
    frame: pd.DataFrame              # UTC hourly DatetimeIndex x feature columns
    units: dict[str, str] = field(default_factory=dict)
    feature_set: str = "full"

    @property
    def feature_names(self) -> list[str]:
        return [str(c) for c in self.frame.columns]

    @property
    def hours(self) -> pd.DatetimeIndex:
        return self.frame.index

    def validate(self) -> None:
        idx = self.frame.index
        if not isinstance(idx, pd.DatetimeIndex) or idx.tz is None:
            raise InvalidInputError("feature matrix index must be tz-aware hourly timestamps")
        if idx.has_duplicates:
            raise InvalidInputError("duplicate hours in feature matrix")
        if self.frame.columns.has_duplicates:
            raise InvalidInputError("duplicate feature columns")
        unknown_units = [c for c in self.frame.columns if c not in self.units]
        if unknown_units:
            raise InvalidInputError(f"columns without a declared unit: {unknown_units}")


def _require(frame: pd.DataFrame, cols, purpose: str) -> None:
    missing = [c for c in cols if c not in frame.columns]
    if missing:
        raise SchemaMismatchError(f"missing column(s) {missing} required for {purpose}")


def base_matrix_from_series(series: dict) -> FeatureMatrix:
    """Assemble the raw base matrix from named ingest series.

    Expects per-area quantities plus ``price_DE`` and directional
    ``exchange_in_<CC>``/``exchange_out_<CC>`` pairs; net flows (import
    positive) and price differences versus the German zone are derived
    here. Series are outer-joined; gaps stay NaN for the assemble step.
    """
    def need(name: str) -> pd.Series:
        if name not in series:
            raise SchemaMismatchError(f"bundle is missing series: {name}")
        return series[name]

    cols = {}
    for area in CONTROL_AREAS:
        for prefix in ("load", "wind_on", "solar", "ror_hydro", "gen_rest"):
            name = f"{prefix}_{area}"
            cols[name] = need(name)
    for zone in OFFSHORE_ZONES:
        cols[f"wind_off_{zone}"] = need(f"wind_off_{zone}")
    price_de = need("price_DE")
    for cc in NEIGHBOURS:
        cols[f"flow_{cc}"] = need(f"exchange_in_{cc}").sub(
            need(f"exchange_out_{cc}"), fill_value=np.nan)
        price = need(f"price_{cc}")
        cols[f"price_{cc}"] = price
        cols[f"price_diff_{cc}"] = price - price_de
    frame = pd.DataFrame(cols)
    frame = frame[list(base_columns())]
    return FeatureMatrix(frame, base_columns(), "full")


def engineer_features(base: FeatureMatrix, feature_set: str = "engineered") -> FeatureMatrix:
    """Derive aggregate features and emit the requested feature set.

    full:        all base features (minus the always-excluded 50Hertz hydro).
    engineered:  adds wind_north, hydro_south, solar_DE and per-area residual
                 loads; drops the wind/hydro constituent columns.
    reduced:     the six-feature explainability set.
    """
    if feature_set not in FEATURE_SETS:
        raise InvalidInputError(f"unknown feature set: {feature_set!r}")
    frame = base.frame.copy()
    units = dict(base.units)

    if feature_set == "full":
        keep = [c for c in frame.columns if c not in EXCLUDED_ALWAYS]
        return FeatureMatrix(frame[keep], {c: units[c] for c in keep}, "full")

    _require(frame, WIND_NORTH_PARTS, "wind_north")
    frame["wind_north"] = sum(frame[c] for c in WIND_NORTH_PARTS)
    _require(frame, HYDRO_SOUTH_PARTS, "hydro_south")
    frame["hydro_south"] = sum(frame[c] for c in HYDRO_SOUTH_PARTS)
    solar_cols = [f"solar_{a}" for a in CONTROL_AREAS]
    _require(frame, solar_cols, "solar_DE")
    frame["solar_DE"] = sum(frame[c] for c in solar_cols)
    for area in CONTROL_AREAS:
        parts = [f"load_{area}", f"solar_{area}", f"ror_hydro_{area}", *AREA_WIND[area]]
        _require(frame, parts, f"residual_load_{area}")
        non_dispatchable = sum(frame[c] for c in parts[1:])
        frame[f"residual_load_{area}"] = frame[f"load_{area}"] - non_dispatchable
    for c in ("wind_north", "hydro_south", "solar_DE",
              *(f"residual_load_{a}" for a in CONTROL_AREAS)):
        units[c] = "MW"

    if feature_set == "reduced":
        keep = list(REDUCED_FEATURES)
        _require(frame, keep, "the reduced feature set")
    else:
        dropped = set(WIND_NORTH_PARTS) | set(HYDRO_SOUTH_PARTS) | set(EXCLUDED_ALWAYS)
        keep = [c for c in frame.columns if c not in dropped]
    return FeatureMatrix(frame[keep], {c: units[c] for c in keep}, feature_set)
