#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot paths (histogram accumulation inside training, batch
prediction, SHAP attribution) on synthetic study data and prints a
side-by-side table. Run after `pip install -e . --no-build-isolation`:

    python benchmarks/bench_backends.py [--days 60] [--trees 200]
"""

import argparse
import time

from gridxai import _kernels
from gridxai.explain import interaction_values, tree_shap
from gridxai.model import Hyperparameters, fit
from gridxai.synthetic import synthetic_study


def _swap_backend(backend):
    _kernels.node_histograms = backend.node_histograms
    _kernels.predict_tree = backend.predict_tree
    _kernels.tree_shap_batch = backend.tree_shap_batch


def _time(fn, repeat=1):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--days", type=int, default=60)
    ap.add_argument("--trees", type=int, default=200)
    ap.add_argument("--explain-rows", type=int, default=500)
    args = ap.parse_args()

    backends = [("python", _kernels.pure)]
    if _kernels.compiled is not None:
        backends.insert(0, ("cython", _kernels.compiled))
    else:
        print("NOTE: compiled extension not available; benchmarking fallback only")

    ds = synthetic_study(n_days=args.days, seed=0)
    X = ds.features()
    y = ds.volume
    hp = Hyperparameters(n_trees=args.trees, max_depth=5, learning_rate=0.08)
    rows = min(args.explain_rows, len(X))
    print(f"dataset: {len(X)} rows x {len(ds.feature_names)} features, "
          f"{args.trees} trees, {rows} explained rows\n")

    results = {}
    for name, impl in backends:
        _swap_backend(impl)
        t_fit, model = _time(lambda: fit(X, y, hp))
        t_pred, _ = _time(lambda: model.predict(X), repeat=3)
        t_shap, _ = _time(lambda: tree_shap(model, X.iloc[:rows]))
        t_inter, _ = _time(lambda: interaction_values(model, X.iloc[: rows // 5]))
        results[name] = (t_fit, t_pred, t_shap, t_inter)

    _swap_backend(backends[0][1])

    header = f"{'operation':<28}" + "".join(f"{n:>12}" for n, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    labels = ("fit", "predict (full set)", f"tree_shap ({rows} rows)",
              f"interactions ({rows // 5} rows)")
    for i, label in enumerate(labels):
        row = f"{label:<28}"
        for name, _ in backends:
            row += f"{results[name][i]:>11.3f}s"
        if len(backends) == 2:
            row += f"{results['python'][i] / results['cython'][i]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
