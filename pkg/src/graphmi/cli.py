"""Command line interface.

Subcommands: run, scan, table, synth, export-graph. Exit codes: 0 success,
1 validation error, 2 numeric failure, 3 I/O error.
"""

import argparse
import sys

from .crossval import cv_scan, export_cv_report_csv
from .errors import GraphMIError, exit_code_for
from .experiment import (
    ExperimentConfig,
    parse_band_request,
    prepare_trials,
    run_experiment,
    run_table,
    write_result_csv,
    write_table_csv,
)
from .graph import build_graph, export_adjacency_csv, export_eigenvalues_csv, spectrum
from .synthetic import generate_synthetic


def _add_common(p):
    p.add_argument("--data", required=True, help="directory holding the neutral-format files")
    p.add_argument("--subject", required=True, help="recording name inside the data directory")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)


def _add_model_knobs(p):
    p.add_argument("--rows-per-end", type=int, default=1, dest="rows_per_end")
    p.add_argument("--c", type=float, default=1.0, dest="margin_cost", help="soft-margin cost C")
    p.add_argument("--log-features", action="store_true", dest="log_features")
    p.add_argument("--standardize-features", action="store_true", dest="standardize_features")
    p.add_argument("--filter-scope", choices=("recording", "epoch"), default="recording")
    p.add_argument("--zero-phase", action="store_true", dest="zero_phase")
    p.add_argument(
        "--strict-rank",
        action="store_true",
        dest="strict_rank",
        help="fail on rank-deficient covariances instead of discarding directions",
    )


def _config(args, band_mode="all", band_cutoff=None) -> ExperimentConfig:
    return ExperimentConfig(
        data_dir=args.data,
        subject=args.subject,
        band_mode=band_mode,
        band_cutoff=band_cutoff,
        rows_per_end=getattr(args, "rows_per_end", 1),
        margin_cost=getattr(args, "margin_cost", 1.0),
        folds=args.folds,
        seed=args.seed,
        filter_scope=getattr(args, "filter_scope", "recording"),
        zero_phase=getattr(args, "zero_phase", False),
        log_features=getattr(args, "log_features", False),
        standardize_features=getattr(args, "standardize_features", False),
        allow_rank_reduction=not getattr(args, "strict_rank", False),
    )


def _cmd_run(args) -> int:
    mode, cutoff = parse_band_request(args.band)
    config = _config(args, mode, cutoff)
    result = run_experiment(config)
    write_result_csv(result, args.out)
    test_acc = "n/a" if result.test_accuracy != result.test_accuracy else f"{result.test_accuracy:.4f}"
    print(
        f"{result.subject} band={result.band.mode}[{result.band.lo},{result.band.hi}] "
        f"train={result.train_accuracy:.4f} test={test_acc} -> {args.out}"
    )
    return 0


def _cmd_scan(args) -> int:
    config = _config(args)
    train, _ = prepare_trials(config)
    spec = spectrum(build_graph(train))
    report = cv_scan(
        train,
        spec,
        folds=config.folds,
        seed=config.seed,
        margin_cost=config.margin_cost,
        rows_per_end=config.rows_per_end,
        log_features=config.log_features,
        standardize_features=config.standardize_features,
    )
    export_cv_report_csv(report, args.out)
    print(
        f"{config.subject}: scanned {len(report.accuracies)} cutoffs, "
        f"best={report.best_cutoff} "
        f"(acc={report.accuracies[report.best_cutoff]:.4f}) -> {args.out}"
    )
    return 0


def _cmd_table(args) -> int:
    subjects = [s for s in args.subjects.split(",") if s]
    band_labels = [b for b in args.bands.split(",") if b]
    base = ExperimentConfig(data_dir=args.data, subject=subjects[0], folds=args.folds, seed=args.seed)
    table = run_table(base, subjects, band_labels)
    write_table_csv(table, args.out)
    for band_label, subject, message in table.failures:
        print(f"failed cell band={band_label} subject={subject}: {message}", file=sys.stderr)
    print(f"{len(table.cells)} cells -> {args.out}")
    return 1 if table.failures else 0


def _cmd_synth(args) -> int:
    rec = generate_synthetic(
        seed=args.seed,
        n_channels=args.channels,
        n_trials_per_class=args.trials,
        separation=args.separation,
        out_dir=args.out,
    )
    n_train = sum(1 for m in rec.markers if m.split == "train")
    print(
        f"wrote synthetic dataset: {rec.n_channels} channels, {len(rec.markers)} trials "
        f"({n_train} train) -> {args.out}"
    )
    return 0


def _cmd_export_graph(args) -> int:
    config = _config(args)
    train, _ = prepare_trials(config)
    graph = build_graph(train)
    export_adjacency_csv(graph, args.out)
    if args.eigenvalues:
        export_eigenvalues_csv(spectrum(graph), args.eigenvalues)
    print(f"{config.subject}: adjacency ({graph.n_vertices}x{graph.n_vertices}) -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphmi",
        description="Graph-spectral discriminative-subspace classification of two-class trials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train on the train split, evaluate on the test split")
    _add_common(p)
    p.add_argument("--band", default="all", help="all|lf|mf|hf|fixed:<k>|ss")
    _add_model_knobs(p)
    p.add_argument("--out", default="results.csv")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("scan", help="cross-validated cutoff scan on the train split")
    _add_common(p)
    _add_model_knobs(p)
    p.add_argument("--out", default="curve.csv")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("table", help="accuracy grid over subjects and bands")
    p.add_argument("--data", required=True)
    p.add_argument("--subjects", required=True, help="comma-separated subject names")
    p.add_argument("--bands", required=True, help="comma-separated band requests")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default="table.csv")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("synth", help="generate a synthetic dataset in the neutral format")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--channels", type=int, required=True)
    p.add_argument("--trials", type=int, required=True, help="trials per class")
    p.add_argument("--separation", type=float, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("export-graph", help="export the training-split connectivity graph")
    _add_common(p)
    p.add_argument("--out", default="adjacency.csv")
    p.add_argument("--eigenvalues", default=None, help="optional eigenvalue CSV path")
    p.set_defaults(func=_cmd_export_graph)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits 2 on bad usage; the contract reserves 2 for numeric failures
        return 0 if err.code == 0 else 1
    try:
        return args.func(args)
    except (GraphMIError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return exit_code_for(err)


if __name__ == "__main__":
    sys.exit(main())
