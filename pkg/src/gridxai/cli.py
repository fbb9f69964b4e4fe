"""Command-line orchestration of the study pipeline.

Subcommands: ingest, build, train, rfe, explain, report. Every command
is a pure function of (bundle, config, seed); outputs land under the
configured out directory and reruns are byte-identical. Exit codes: 0
success, 2 configuration errors, 3 data/schema/prerequisite errors,
4 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .data.assemble import StudyDataset, assemble
from .data.features import (
    FEATURE_SETS,
    base_matrix_from_series,
    engineer_features,
)
from .data.records import complete_cross_border, filter_records
from .data.target import hourly_volume
from .errors import (
    ConfigError,
    FixtureMissingError,
    GridXaiError,
    InvalidInputError,
    MissingArtifactError,
    ParseError,
    SchemaMismatchError,
    UndefinedScoreError,
)
from .explain import (
    feature_importance,
    interaction_values,
    tree_shap,
    write_attributions_csv,
    write_interactions_csv,
)
from .evaluate import DEFAULT_SPACE, GroupGapSplit, cross_val_score, random_search, rfe
from .evaluate.rfe import explain_subset
from .evaluate.scoring import r2
from .ingest.client import EntsoeClient
from .ingest.redispatch import parse_redispatch_csv, parse_redispatch_jsonl
from .ingest.snapshot import load_manifest, read_normalized, snapshot, study_requests
from .model import Hyperparameters, fit
from .model import load as load_model
from .model import save as save_model
from . import reports

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4

_DATA_ERRORS = (SchemaMismatchError, ParseError, InvalidInputError,
                FixtureMissingError, MissingArtifactError, UndefinedScoreError)


@dataclass
class RunConfig:
    window_start: Optional[str] = None
    window_end: Optional[str] = None
    bundle_dir: str = "bundle"
    out_dir: str = "out"
    cache_dir: Optional[str] = None
    fixtures_dir: Optional[str] = None
    offline: bool = False
    api_token_env: str = "ENTSOE_API_TOKEN"
    redispatch_csv: Optional[str] = None
    redispatch_jsonl: Optional[str] = None
    feature_set: str = "reduced"
    include_features: list = field(default_factory=list)
    exclude_features: list = field(default_factory=list)
    hyperparameters: Optional[dict] = None
    hpo: Optional[dict] = None
    cv: dict = field(default_factory=lambda: {"n_folds": 5, "gap_hours": 24})
    seed: int = 0
    explain_rows: Optional[int] = None
    interactions: bool = False
    interaction_rows: int = 400
    rfe_min_features: int = 1
    report: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def window(self):
        if not self.window_start or not self.window_end:
            raise ConfigError("config needs window_start and window_end")
        try:
            start = pd.Timestamp(self.window_start)
            end = pd.Timestamp(self.window_end)
        except ValueError as exc:
            raise ConfigError(f"bad window timestamps: {exc}") from exc
        if start.tzinfo is None:
            start = start.tz_localize("UTC")
        if end.tzinfo is None:
            end = end.tz_localize("UTC")
        return start.tz_convert("UTC"), end.tz_convert("UTC")

    def validate(self) -> None:
        if self.feature_set not in FEATURE_SETS:
            raise ConfigError(f"feature_set must be one of {FEATURE_SETS}")
        if self.cv.get("n_folds", 5) < 2:
            raise ConfigError("cv.n_folds must be >= 2")
        if self.hyperparameters is not None:
            try:
                self.resolved_hp().validate()
            except (TypeError, InvalidInputError) as exc:
                raise ConfigError(f"bad hyperparameters: {exc}") from exc
        if self.hpo is not None and self.hpo.get("n_trials", 0) < 1:
            raise ConfigError("hpo.n_trials must be >= 1")
        if self.rfe_min_features < 1:
            raise ConfigError("rfe_min_features must be >= 1")

    def resolved_hp(self) -> Hyperparameters:
        d = dict(self.hyperparameters or {})
        d.setdefault("seed", self.seed)
        return Hyperparameters(**d)

    def cv_config(self) -> GroupGapSplit:
        return GroupGapSplit(
            n_folds=int(self.cv.get("n_folds", 5)),
            gap_hours=float(self.cv.get("gap_hours", 24)),
            seed=int(self.cv.get("seed", self.seed)),
        )


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _prepare_out(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "run_config.json", asdict(cfg))
    return out


def _make_client(cfg: RunConfig) -> EntsoeClient:
    token = os.environ.get(cfg.api_token_env)
    return EntsoeClient(
        token=token,
        cache_dir=cfg.cache_dir,
        fixtures_dir=cfg.fixtures_dir,
        offline=cfg.offline,
    )


def _require_file(path: Path, producer: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(
            f"{path.name} not found in {path.parent}; run `gridxai {producer}` first",
            prerequisite=producer,
        )
    return path


def _stamps(index) -> list[str]:
    return [ts.strftime("%Y-%m-%dT%H:%M:%SZ") for ts in index]


# -- commands ----------------------------------------------------------------


def cmd_ingest(cfg: RunConfig) -> int:
    out = _prepare_out(cfg)
    window = cfg.window()
    client = _make_client(cfg)
    manifest = snapshot(client, study_requests(window), cfg.bundle_dir)
    n_ok = len(manifest["series"])
    n_gaps = len(manifest["gaps"])
    print(f"ingest: {n_ok} series -> {cfg.bundle_dir} "
          f"({'incomplete, ' + str(n_gaps) + ' gaps' if manifest['incomplete'] else 'complete'})")
    if n_ok == 0:
        raise FixtureMissingError("ingest produced no series at all; check fixtures/token")
    return EXIT_OK


def _load_records(cfg: RunConfig):
    if cfg.redispatch_jsonl:
        path = Path(cfg.redispatch_jsonl)
        if not path.exists():
            raise InvalidInputError(f"redispatch JSONL not found: {path}")
        return parse_redispatch_jsonl(path.read_bytes())
    path = Path(cfg.redispatch_csv) if cfg.redispatch_csv else None
    if path is None and cfg.fixtures_dir:
        candidate = Path(cfg.fixtures_dir) / "redispatch.csv"
        path = candidate if candidate.exists() else None
    if path is None or not path.exists():
        raise InvalidInputError(
            "no intervention records: set redispatch_csv (or redispatch_jsonl) in the config"
        )
    return parse_redispatch_csv(path.read_bytes())


def cmd_build(cfg: RunConfig) -> int:
    out = _prepare_out(cfg)
    window = cfg.window()
    manifest_path = Path(cfg.bundle_dir) / "manifest.json"
    _require_file(manifest_path, "ingest")
    manifest = load_manifest(cfg.bundle_dir)
    series = {e["name"]: read_normalized(cfg.bundle_dir, e["name"])
              for e in manifest["series"]}

    records, rejects = _load_records(cfg)
    kept = complete_cross_border(filter_records(records))
    target = hourly_volume(kept, window)

    base = base_matrix_from_series(series)
    features = engineer_features(base, cfg.feature_set)
    frame = features.frame
    if cfg.exclude_features:
        frame = frame.drop(columns=[c for c in cfg.exclude_features if c in frame.columns])
    if cfg.include_features:
        missing = [c for c in cfg.include_features if c not in frame.columns]
        if missing:
            raise SchemaMismatchError(f"include_features not in feature set: {missing}")
        frame = frame[list(cfg.include_features)]
    features = type(features)(frame, {c: features.units[c] for c in frame.columns},
                              cfg.feature_set)

    dataset, provenance = assemble(target, features)
    provenance.update({
        "feature_set": cfg.feature_set,
        "n_records_parsed": len(records),
        "n_records_kept": len(kept),
        "csv_rejects": rejects,
        "n_features": len(dataset.feature_names),
    })
    dataset.to_csv(out / "dataset.csv")
    _write_json(out / "provenance.json", provenance)
    print(f"build: {provenance['rows_kept']} rows x {provenance['n_features']} features "
          f"-> {out / 'dataset.csv'} ({provenance['rows_dropped']} rows dropped)")
    return EXIT_OK


def _load_dataset(cfg: RunConfig) -> StudyDataset:
    path = _require_file(Path(cfg.out_dir) / "dataset.csv", "build")
    return StudyDataset.from_csv(path, feature_set=cfg.feature_set)


def cmd_train(cfg: RunConfig) -> int:
    out = _prepare_out(cfg)
    dataset = _load_dataset(cfg)
    cv = cfg.cv_config()

    hpo_summary = None
    if cfg.hpo:
        space = cfg.hpo.get("space") or {
            k: tuple(v) if isinstance(v, list) else v for k, v in DEFAULT_SPACE.items()
        }
        space = {k: tuple(v) if isinstance(v, list) else v for k, v in space.items()}
        result = random_search(
            dataset, space, int(cfg.hpo["n_trials"]), cv, seed=cfg.seed,
            include_default=cfg.resolved_hp() if cfg.hyperparameters else None,
        )
        result.to_jsonl(out / "trials.jsonl")
        hp = result.best_hp
        hpo_summary = {"n_trials": len(result.trials), "best_trial": result.best_trial,
                       "best_mean_r2": result.best_score}
    else:
        hp = cfg.resolved_hp()

    fold_scores = cross_val_score(dataset, hp, cv)
    model = fit(dataset.features(), dataset.volume, hp)
    retrained_r2 = r2(dataset.volume, model.predict(dataset.features()))
    save_model(model, out / "model.json")

    report = {
        "fold_r2": [float(s) for s in fold_scores],
        "mean_cv_r2": float(np.mean(fold_scores)),
        "retrained_in_sample_r2": float(retrained_r2),
        "note": "retrained score is in-sample and optimistic; compare mean_cv_r2",
        "hyperparameters": hp.to_dict(),
        "cv": {"n_folds": cv.n_folds, "gap_hours": cv.gap_hours, "seed": cv.seed},
        "n_rows": int(len(dataset.frame)),
        "feature_set": cfg.feature_set,
        "features": dataset.feature_names,
    }
    if hpo_summary:
        report["hpo"] = hpo_summary
    _write_json(out / "cv_report.json", report)
    print(f"train: mean CV R^2 = {report['mean_cv_r2']:.4f} -> {out / 'model.json'}")
    return EXIT_OK


def cmd_rfe(cfg: RunConfig) -> int:
    out = _prepare_out(cfg)
    dataset = _load_dataset(cfg)
    trace = rfe(dataset, cfg.resolved_hp(), cfg.cv_config(),
                min_features=cfg.rfe_min_features,
                explain_rows=cfg.explain_rows or 256)
    trace.to_jsonl(out / "rfe_trace.jsonl")
    summary = trace.summary_frame()
    reports.write_grid_csv(summary, out / "rfe_summary.csv")
    print(f"rfe: {len(trace.steps)} steps, final features: {trace.final_features}")
    return EXIT_OK


def cmd_explain(cfg: RunConfig) -> int:
    out = _prepare_out(cfg)
    dataset = _load_dataset(cfg)
    model = load_model(_require_file(Path(cfg.out_dir) / "model.json", "train"))
    X = dataset.features()
    rows = explain_subset(len(X), cfg.explain_rows) if cfg.explain_rows else np.arange(len(X))
    Xe = X.iloc[rows]
    s = tree_shap(model, Xe)
    write_attributions_csv(s, out / "shap_values.csv", index=Xe.index)
    reports.write_importance_csv(feature_importance(s), out / "importance.csv")
    if cfg.interactions:
        sub = explain_subset(len(Xe), cfg.interaction_rows)
        ir = interaction_values(model, Xe.iloc[sub])
        write_interactions_csv(ir, out / "interactions.csv", index=Xe.index[sub])
    print(f"explain: {len(Xe)} rows -> {out / 'shap_values.csv'}")
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    out = _prepare_out(cfg)
    dataset = _load_dataset(cfg)
    model = load_model(_require_file(Path(cfg.out_dir) / "model.json", "train"))
    shap_path = _require_file(Path(cfg.out_dir) / "shap_values.csv", "explain")

    shap_frame = pd.read_csv(shap_path, float_precision="round_trip")
    stamps = pd.DatetimeIndex(pd.to_datetime(shap_frame["timestamp"], utc=True))
    feat_names = [c for c in shap_frame.columns if c not in ("timestamp", "base_value")]
    phi = shap_frame[feat_names].to_numpy(dtype=np.float64)
    X = dataset.features().reindex(stamps)
    if X.isna().any().any():
        raise SchemaMismatchError("shap_values.csv rows are not part of dataset.csv")

    rep_dir = out / "report"
    rep_dir.mkdir(exist_ok=True)

    from .explain.treeshap import ShapResult

    s = ShapResult(base_value=float(shap_frame["base_value"].iloc[0]), values=phi,
                   feature_names=feat_names)
    fi = feature_importance(s)
    reports.write_importance_csv(fi, rep_dir / "importance.csv")

    # one interaction computation feeds auto-coloring and the pair files
    sub = explain_subset(len(X), cfg.interaction_rows)
    ir = interaction_values(model, X.iloc[sub])
    strength = np.abs(ir.values).sum(axis=0)  # [m, m]

    stamp_strs = _stamps(stamps)
    sub_stamps = [stamp_strs[i] for i in sub]
    for j, feat in enumerate(feat_names):
        if len(feat_names) > 1:
            others = strength[j].copy()
            others[j] = -1.0
            color_idx = int(np.argmax(others))
            color_name = feat_names[color_idx]
            color_values = X.iloc[:, color_idx].to_numpy()
        else:
            color_name, color_values = None, None
        reports.write_dependence_csv(
            stamp_strs, X.iloc[:, j].to_numpy(), phi[:, j], color_values, color_name,
            rep_dir / f"dependence_{feat}.csv",
        )

    meta = {
        "x_feature": None,
        "heatmap_bins": int(cfg.report.get("heatmap_bins", 30)),
        "kde_bandwidth_rule": "scott",
        "interaction_rows": int(len(sub)),
        "colors": {},
        "grids": [],
        "skipped": [],
    }
    top = fi.ranking()[0]
    meta["x_feature"] = str(cfg.report.get("x_feature", "wind_north"))
    if meta["x_feature"] not in feat_names:
        meta["skipped"].append(f"x_feature {meta['x_feature']} not in dataset; using {top}")
        meta["x_feature"] = top
    xj = feat_names.index(meta["x_feature"])

    for k, feat in enumerate(feat_names):
        if k == xj:
            continue
        reports.write_interaction_pair_csv(
            sub_stamps,
            X.iloc[sub, xj].to_numpy(), X.iloc[sub, k].to_numpy(),
            ir.values[:, xj, k],
            rep_dir / f"interaction_{meta['x_feature']}_vs_{feat}.csv",
        )

    n_bins = meta["heatmap_bins"]
    flows = cfg.report.get("flows", ["flow_DK", "flow_FR"])
    x_all = dataset.frame[meta["x_feature"]].to_numpy() if meta["x_feature"] in dataset.frame else None
    for flow in flows:
        if x_all is None or flow not in dataset.frame.columns:
            meta["skipped"].append(f"grid {meta['x_feature']} x {flow}: column missing")
            continue
        y_all = dataset.frame[flow].to_numpy()
        grid = reports.binned_grid(x_all, y_all, dataset.volume, n_bins)
        reports.write_grid_csv(grid, rep_dir / f"heatmap_{meta['x_feature']}_vs_{flow}.csv")
        dens = reports.density_grid(x_all, y_all, n_bins)
        reports.write_grid_csv(dens, rep_dir / f"density_{meta['x_feature']}_vs_{flow}.csv")
        meta["grids"].append(f"{meta['x_feature']} x {flow}")

    for j, feat in enumerate(feat_names):
        others = strength[j].copy()
        others[j] = -1.0
        meta["colors"][feat] = feat_names[int(np.argmax(others))] if len(feat_names) > 1 else None
    _write_json(rep_dir / "report_meta.json", meta)
    print(f"report: {len(feat_names)} dependence files, {len(meta['grids'])} grids -> {rep_dir}")
    return EXIT_OK


# -- entry point --------------------------------------------------------------

_COMMANDS = {
    "ingest": cmd_ingest,
    "build": cmd_build,
    "train": cmd_train,
    "rfe": cmd_rfe,
    "explain": cmd_explain,
    "report": cmd_report,
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="override config seed")
    common.add_argument("--offline", action="store_true", help="never touch the network")
    common.add_argument("--fixtures", help="directory with offline fixture files")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--bundle", help="bundle directory (overrides config)")
    p = argparse.ArgumentParser(prog="gridxai",
                                description="congestion/redispatch study pipeline")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def _resolve_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.offline:
        cfg.offline = True
    if args.fixtures:
        cfg.fixtures_dir = args.fixtures
    if args.out:
        cfg.out_dir = args.out
    if args.bundle:
        cfg.bundle_dir = args.bundle
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except GridXaiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
