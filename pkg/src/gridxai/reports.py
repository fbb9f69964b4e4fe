"""Plot-ready report artifacts: importance tables, dependence data,
interaction pairs, binned mean-volume grids and kernel-density grids."""

from __future__ import annotations

import csv

import numpy as np
import pandas as pd
from scipy.stats import gaussian_kde

from .errors import InvalidInputError
from .explain.summaries import FeatureImportance


def write_importance_csv(fi: FeatureImportance, path) -> None:
    order = np.argsort(-fi.values, kind="stable")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["feature", "importance"])
        for i in order:
            w.writerow([fi.feature_names[i], repr(float(fi.values[i]))])


def binned_grid(x: np.ndarray, y: np.ndarray, z: np.ndarray,
                n_bins: int = 30) -> pd.DataFrame:
    """Fixed-width 2-D binning of z over (x, y); empty cells keep NaN means."""
    if len(x) == 0:
        raise InvalidInputError("cannot bin an empty dataset")
    if n_bins < 1:
        raise InvalidInputError("n_bins must be >= 1")
    xe = np.linspace(float(np.min(x)), float(np.max(x)), n_bins + 1)
    ye = np.linspace(float(np.min(y)), float(np.max(y)), n_bins + 1)
    xi = np.clip(np.searchsorted(xe, x, side="right") - 1, 0, n_bins - 1)
    yi = np.clip(np.searchsorted(ye, y, side="right") - 1, 0, n_bins - 1)
    flat = xi * n_bins + yi
    count = np.bincount(flat, minlength=n_bins * n_bins).astype(float)
    total = np.bincount(flat, weights=z, minlength=n_bins * n_bins)
    with np.errstate(invalid="ignore"):
        mean = np.where(count > 0, total / np.maximum(count, 1), np.nan)
    rows = []
    for i in range(n_bins):
        for j in range(n_bins):
            k = i * n_bins + j
            rows.append({
                "x_lo": xe[i], "x_hi": xe[i + 1],
                "y_lo": ye[j], "y_hi": ye[j + 1],
                "count": int(count[k]),
                "mean_volume": mean[k],
            })
    return pd.DataFrame(rows)


def density_grid(x: np.ndarray, y: np.ndarray, n_bins: int = 30) -> pd.DataFrame:
    """Gaussian KDE (Scott's-rule bandwidth) evaluated on the bin-center grid."""
    kde = gaussian_kde(np.vstack([x, y]))  # scipy default bandwidth is Scott's rule
    xe = np.linspace(float(np.min(x)), float(np.max(x)), n_bins + 1)
    ye = np.linspace(float(np.min(y)), float(np.max(y)), n_bins + 1)
    xc = (xe[:-1] + xe[1:]) / 2
    yc = (ye[:-1] + ye[1:]) / 2
    gx, gy = np.meshgrid(xc, yc, indexing="ij")
    dens = kde(np.vstack([gx.ravel(), gy.ravel()]))
    return pd.DataFrame({
        "x_center": gx.ravel(),
        "y_center": gy.ravel(),
        "density": dens,
    })


def _write_table(frame: pd.DataFrame, path, float_cols) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(frame.columns))
        for row in frame.itertuples(index=False):
            out = []
            for col, v in zip(frame.columns, row):
                if col in float_cols:
                    out.append("" if (isinstance(v, float) and np.isnan(v)) else repr(float(v)))
                else:
                    out.append(v)
            w.writerow(out)


def write_grid_csv(frame: pd.DataFrame, path) -> None:
    float_cols = {c for c in frame.columns if frame[c].dtype.kind == "f"}
    _write_table(frame, path, float_cols)


def write_dependence_csv(stamps, feature_values, shap_values, color_values,
                         color_name, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        header = ["timestamp", "feature_value", "shap_value"]
        if color_name is not None:
            header.append(f"color_{color_name}")
        w.writerow(header)
        for i, ts in enumerate(stamps):
            row = [ts, repr(float(feature_values[i])), repr(float(shap_values[i]))]
            if color_name is not None:
                row.append(repr(float(color_values[i])))
            w.writerow(row)


def write_interaction_pair_csv(stamps, a_values, b_values, phi_ab, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "feature_a_value", "feature_b_value", "interaction"])
        for i, ts in enumerate(stamps):
            w.writerow([ts, repr(float(a_values[i])), repr(float(b_values[i])),
                        repr(float(phi_ab[i]))])
