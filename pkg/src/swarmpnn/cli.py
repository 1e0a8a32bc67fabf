"""Command-line harness: dataset fetching, training runs and the full
benchmark grid with its tables and figure data.

Outputs carry no timestamps and all randomness derives from the configured
seed, so re-running a command with the same inputs reproduces every file
byte for byte.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import datasets as data_mod
from .datasets import (
    REGISTRY,
    SplitSpec,
    ensure_dataset,
    load_csv,
    stratified_split,
    zscore_standardize,
)
from .hybrid import HybridConfig, train_hybrid, train_single
from .metrics import REPORT_DECIMALS, aggregate_runs, compute_metrics, rank
from .pnn import DensityEvaluator

SINGLE_METHODS = ("pso", "fpa", "bat", "bfo", "sa")
PORTFOLIO = "hybrid"
# default table column order mirrors the published comparison tables
DEFAULT_METHODS = (PORTFOLIO, "bat", "bfo", "pso", "fpa", "sa")
METRIC_TABLES = ("avg_accuracy", "max_accuracy", "avg_precision", "avg_recall")


@dataclass
class CellSpec:
    """One benchmark grid cell: a (dataset, method, run) triple."""

    dataset: str
    method: str
    run_index: int
    config: dict


def default_config() -> dict:
    return {
        "datasets": ["iris"],
        "methods": list(DEFAULT_METHODS),
        "runs": 10,
        "seed": 0,
        "jobs": 1,
        "data_dir": None,
        "paths": {},
        "split": {"test_fraction": 0.2},
        "zscore": False,
        "hybrid": {},
        "pso": {}, "bat": {}, "bfo": {}, "sa": {}, "fpa": {},
    }


def load_config(path) -> dict:
    cfg = default_config()
    with open(path, encoding="utf-8") as fh:
        user = json.load(fh)
    for key, value in user.items():
        if key not in cfg:
            raise SystemExit(f"config: unknown key {key!r}")
        if isinstance(cfg[key], dict) and isinstance(value, dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    if cfg["datasets"] == "all":
        cfg["datasets"] = sorted(REGISTRY)
    return cfg


def _dataset_path(name: str, config: dict) -> str:
    override = config.get("paths") or {}
    if name in override:
        return override[name]
    return ensure_dataset(name, config.get("data_dir"))


def _load_split(name: str, config: dict, run_seed: int):
    path = _dataset_path(name, config)
    descriptor = REGISTRY.get(name)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", data_mod.DatasetValidationWarning)
        ds = load_csv(path, descriptor)
    spec = SplitSpec(config["split"].get("test_fraction", 0.2), seed=run_seed)
    train, test = stratified_split(ds, spec)
    if config.get("zscore"):
        train, test = zscore_standardize(train, test)
    return train, test


def _hybrid_config(config: dict, run_seed: int) -> HybridConfig:
    overrides = dict(config.get("hybrid") or {})
    method_params = {m: config.get(m) or {} for m in SINGLE_METHODS}
    overrides.setdefault("methods", list(SINGLE_METHODS))
    for key in ("methods", "init_range", "bounds"):
        if key in overrides and isinstance(overrides[key], list):
            overrides[key] = tuple(overrides[key])
    return HybridConfig(seed=run_seed, method_params=method_params, **overrides)


def run_cell(spec: CellSpec) -> dict:
    """Train one (dataset, method, run) cell and measure it on the test split."""
    config = spec.config
    run_seed = int(config["seed"]) + spec.run_index
    train, test = _load_split(spec.dataset, config, run_seed)
    cfg = _hybrid_config(config, run_seed)
    if spec.method == PORTFOLIO:
        result = train_hybrid(train, test, cfg)
    else:
        result = train_single(train, test, spec.method, cfg)
    evaluator = DensityEvaluator(train, test.features)
    predictions = evaluator.predict(result.smoothing)
    run_metrics = compute_metrics(predictions, test.labels, train.n_classes,
                                  seed=run_seed)
    return {
        "dataset": spec.dataset,
        "method": spec.method,
        "run_index": spec.run_index,
        "seed": run_seed,
        "metrics": run_metrics.to_jsonable(),
        "train_error": result.train_error,
        "test_error": result.test_error,
        "evaluations": result.evaluations,
        "stop_reason": result.stop_reason,
        "smoothing": result.smoothing.to_jsonable(),
        "trace": [r.to_jsonable() for r in result.trace],
    }


def _dump_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_trace(path, trace) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in trace:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def _metrics_from_cells(cells):
    from .metrics import RunMetrics

    return [RunMetrics(c["metrics"]["accuracy"], c["metrics"]["precision"],
                       c["metrics"]["recall"],
                       np.asarray(c["metrics"]["confusion"]),
                       c["metrics"]["seed"]) for c in cells]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_fetch(args) -> int:
    names = args.dataset or sorted(REGISTRY)
    failures = {}
    for name in names:
        try:
            path = ensure_dataset(name, args.data_dir)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", data_mod.DatasetValidationWarning)
                load_csv(path, REGISTRY[name])
            status = "ok" if not caught else "ok (with validation warnings)"
            for w in caught:
                print(f"  warning: {w.message}", file=sys.stderr)
            print(f"{name}: {status} -> {path}")
        except Exception as exc:
            failures[name] = str(exc)
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
    if failures:
        print(f"{len(failures)} of {len(names)} datasets failed", file=sys.stderr)
        return 1
    return 0


def cmd_train(args) -> int:
    config = default_config()
    config["seed"] = args.seed
    config["runs"] = args.runs
    config["data_dir"] = args.data_dir
    if args.dataset_path:
        config["paths"] = {args.dataset: args.dataset_path}
    hybrid_overrides = {}
    for key in ("iterations", "population_size", "probing_multiplier",
                "fit_multiplier"):
        value = getattr(args, key)
        if value is not None:
            hybrid_overrides[key] = value
    config["hybrid"] = hybrid_overrides
    config["zscore"] = args.zscore
    if args.test_fraction is not None:
        config["split"] = {"test_fraction": args.test_fraction}

    out_dir = os.path.join(args.out, f"{args.dataset}_{args.method}")
    os.makedirs(out_dir, exist_ok=True)
    cells = []
    for run_index in range(args.runs):
        cell = run_cell(CellSpec(args.dataset, args.method, run_index, config))
        cells.append(cell)
        stem = f"run_{run_index:03d}"
        trace = cell.pop("trace")
        _dump_json(os.path.join(out_dir, f"{stem}.json"), cell)
        if args.method == PORTFOLIO:
            _write_trace(os.path.join(out_dir, f"trace_{stem}.jsonl"), trace)
        cell["trace"] = trace
    summary = aggregate_runs(_metrics_from_cells(cells))
    _dump_json(os.path.join(out_dir, "summary.json"), summary.to_jsonable())
    lines = [f"{args.dataset} / {args.method} over {args.runs} runs"]
    for metric in ("accuracy", "precision", "recall"):
        lines.append(f"  {metric}: avg {summary.rounded('avg_' + metric):.3f}"
                     f"  max {summary.rounded('max_' + metric):.3f}")
    text = "\n".join(lines)
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    print(text)
    return 0


def _selection_counts(cells) -> dict:
    counts = {}
    for cell in cells:
        for record in cell["trace"]:
            key = (record["selected"], record["iteration"])
            counts[key] = counts.get(key, 0) + 1
    return counts


def _write_selection_csv(path, counts) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("method,iteration,count\n")
        for (method, iteration), count in sorted(counts.items()):
            fh.write(f"{method},{iteration},{count}\n")


def _selection_chart_svg(dataset: str, counts) -> str:
    """Minimal bar chart of per-method selection totals."""
    totals = {}
    for (method, _), count in sorted(counts.items()):
        totals[method] = totals.get(method, 0) + count
    width, height, pad = 480, 240, 40
    bar_zone = width - 2 * pad
    peak = max(totals.values()) if totals else 1
    bars = []
    step = bar_zone / max(len(totals), 1)
    for i, (method, total) in enumerate(sorted(totals.items())):
        h = (height - 2 * pad) * total / peak
        x = pad + i * step + step * 0.15
        y = height - pad - h
        bars.append(f'<rect x="{x:.1f}" y="{y:.1f}" width="{step * 0.7:.1f}" '
                    f'height="{h:.1f}" fill="#4878a8"/>')
        bars.append(f'<text x="{x + step * 0.35:.1f}" y="{height - pad + 14}" '
                    f'font-size="11" text-anchor="middle">{method}</text>')
        bars.append(f'<text x="{x + step * 0.35:.1f}" y="{y - 4:.1f}" '
                    f'font-size="11" text-anchor="middle">{total}</text>')
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}">'
            f'<text x="{width / 2}" y="18" font-size="13" text-anchor="middle">'
            f'optimizer selections: {dataset}</text>'
            + "".join(bars) + "</svg>\n")


def _write_metric_table(path, table_metric, datasets, methods,
                        per_cell_summaries) -> None:
    datasets = [ds for ds in datasets
                if any((ds, m) in per_cell_summaries for m in methods)]
    scores = {m: {ds: getattr(per_cell_summaries[(ds, m)], table_metric)
                  for ds in datasets if (ds, m) in per_cell_summaries}
              for m in methods}
    complete = all(len(scores[m]) == len(datasets) for m in methods)
    ranks = rank(scores) if complete and datasets else None
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("dataset," + ",".join(methods) + "\n")
        for ds in datasets:
            row = [ds]
            for m in methods:
                summary = per_cell_summaries.get((ds, m))
                row.append("" if summary is None
                           else f"{getattr(summary, table_metric):.{REPORT_DECIMALS}f}")
            fh.write(",".join(row) + "\n")
        if ranks is not None:
            fh.write("Rank," + ",".join(str(ranks[m]) for m in methods) + "\n")


def cmd_benchmark(args) -> int:
    config = load_config(args.config)
    if args.jobs is not None:
        config["jobs"] = args.jobs
    out = args.out
    os.makedirs(out, exist_ok=True)
    for sub in ("tables", "selection"):
        os.makedirs(os.path.join(out, sub), exist_ok=True)
    if args.charts:
        os.makedirs(os.path.join(out, "charts"), exist_ok=True)

    # fetch up front so workers only read cached files
    for name in config["datasets"]:
        if name not in (config.get("paths") or {}):
            ensure_dataset(name, config.get("data_dir"))

    specs = [CellSpec(ds, method, run, config)
             for ds in config["datasets"]
             for method in config["methods"]
             for run in range(int(config["runs"]))]
    results, failures = {}, {}
    jobs = max(1, int(config.get("jobs") or 1))
    if jobs == 1:
        for spec in specs:
            try:
                cell = run_cell(spec)
                results[(spec.dataset, spec.method, spec.run_index)] = cell
            except Exception as exc:
                failures[f"{spec.dataset}/{spec.method}/run{spec.run_index}"] = str(exc)
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(run_cell, spec): spec for spec in specs}
            for future in concurrent.futures.as_completed(futures):
                spec = futures[future]
                try:
                    results[(spec.dataset, spec.method, spec.run_index)] = future.result()
                except Exception as exc:
                    failures[f"{spec.dataset}/{spec.method}/run{spec.run_index}"] = str(exc)

    per_cell_summaries = {}
    raw = {}
    for ds in config["datasets"]:
        for method in config["methods"]:
            cells = [results.get((ds, method, run))
                     for run in range(int(config["runs"]))]
            cells = [c for c in cells if c is not None]
            if not cells:
                continue
            summary = aggregate_runs(_metrics_from_cells(cells))
            per_cell_summaries[(ds, method)] = summary
            raw.setdefault(ds, {})[method] = {
                "summary": summary.to_jsonable(),
                "runs": [{k: c[k] for k in
                          ("run_index", "seed", "metrics", "train_error",
                           "test_error", "evaluations", "stop_reason")}
                         for c in cells],
            }

    for table_metric in METRIC_TABLES:
        _write_metric_table(os.path.join(out, "tables", f"{table_metric}.csv"),
                            table_metric, config["datasets"],
                            config["methods"], per_cell_summaries)

    for ds in config["datasets"]:
        hybrid_cells = [results[(ds, PORTFOLIO, run)]
                        for run in range(int(config["runs"]))
                        if (ds, PORTFOLIO, run) in results]
        if not hybrid_cells:
            continue
        counts = _selection_counts(hybrid_cells)
        _write_selection_csv(os.path.join(out, "selection", f"{ds}.csv"), counts)
        if args.charts:
            with open(os.path.join(out, "charts", f"{ds}.svg"), "w",
                      encoding="utf-8") as fh:
                fh.write(_selection_chart_svg(ds, counts))
        raw.setdefault(ds, {}).setdefault(PORTFOLIO, {})["iterations_executed"] = [
            len(c["trace"]) for c in hybrid_cells]

    _dump_json(os.path.join(out, "summary.json"),
               {"config": {k: v for k, v in config.items() if k != "paths"},
                "results": raw})
    if failures:
        _dump_json(os.path.join(out, "failures.json"), failures)
        print(f"{len(failures)} cells failed; see failures.json", file=sys.stderr)
        return 1
    print(f"benchmark complete: {len(results)} cells -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmpnn",
        description="Train PNN classifiers with a portfolio of swarm optimizers")
    sub = parser.add_subparsers(dest="command", required=True)

    fetch = sub.add_parser("fetch", help="download benchmark datasets")
    fetch.add_argument("--dataset", action="append",
                       help="dataset name (repeatable); default: all")
    fetch.add_argument("--data-dir", default=None)
    fetch.set_defaults(fn=cmd_fetch)

    train = sub.add_parser("train", help="train one dataset with one method")
    train.add_argument("--dataset", required=True)
    train.add_argument("--method", default=PORTFOLIO,
                       choices=(PORTFOLIO,) + SINGLE_METHODS)
    train.add_argument("--runs", type=int, default=10)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", default="runs")
    train.add_argument("--data-dir", default=None)
    train.add_argument("--dataset-path", default=None,
                       help="use a local canonical CSV instead of the registry")
    train.add_argument("--iterations", type=int, default=None)
    train.add_argument("--population-size", type=int, default=None)
    train.add_argument("--probing-multiplier", type=int, default=None)
    train.add_argument("--fit-multiplier", type=int, default=None)
    train.add_argument("--test-fraction", type=float, default=None)
    train.add_argument("--zscore", action="store_true",
                       help="standardize features with training-split stats")
    train.set_defaults(fn=cmd_train)

    bench = sub.add_parser("benchmark", help="run the dataset x method grid")
    bench.add_argument("--config", required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--jobs", type=int, default=None)
    bench.add_argument("--charts", action="store_true",
                       help="emit SVG bar charts of optimizer selections")
    bench.set_defaults(fn=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
