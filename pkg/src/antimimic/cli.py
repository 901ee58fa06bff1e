"""Command-line entry point.

Subcommands: synth (generate the benchmark signal), diagnose (score a
prediction file against a target file), train (one experiment from a
JSON config), sweep (one run per penalty weight plus a summary table),
noise-study (one run per noise level plus a summary table).

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error
(divergence, unreadable/unwritable files).
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, ExperimentConfig
from .metrics import Forecast, mim, summarize
from .series import load_csv
from .synth import SynthSpec, generate
from .training import (METRIC_NAMES, TrainingDiverged, baseline_metrics,
                       lambda_sweep, train, write_metrics_csv, write_report)

_METRIC_LABELS = {"mse": "MSE", "s_mse": "s-MSE", "mim": "MIM", "acc": "Acc",
                  "s_acc": "s-Acc", "f1": "F1"}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; this package reserves 2
    for runtime failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text: str, what: str) -> list:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            raise ValueError(f"{what} must be comma-separated numbers, got {token!r}") from None
    if not values:
        raise ValueError(f"{what} must contain at least one value")
    return values


def _metrics_lines(metrics: dict) -> list:
    return [f"{_METRIC_LABELS[name]:>6}  {metrics[name]:.6g}" for name in METRIC_NAMES]


def cmd_synth(args) -> int:
    spec = SynthSpec(n=args.n, dt=args.dt, trend_slope=args.trend,
                     noise_mu=args.mu, noise_sigma=args.sigma, seed=args.seed)
    series = generate(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value"])
        for v in series.values:
            writer.writerow([repr(float(v))])
    print(f"wrote {len(series)} rows to {out}")
    return 0


def cmd_diagnose(args) -> int:
    targets = load_csv(args.targets, args.target_column)
    predictions = load_csv(args.predictions, args.prediction_column)
    n_targets = len(targets) - 1
    if len(predictions) != n_targets:
        raise ValueError(
            f"after the anchor row the target file holds {n_targets} values but the "
            f"prediction file holds {len(predictions)}"
        )
    forecast = Forecast(targets=targets.values[1:], predictions=predictions.values,
                        anchor=targets.values[0])
    metrics = summarize(forecast)
    for line in _metrics_lines(metrics):
        print(line)
    verdict = "yes" if mim(forecast) > 0 else "no"
    print(f"MIMICKING: {verdict}")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_metrics_csv(out, [metrics], list(METRIC_NAMES))
        print(f"wrote metrics to {out}")
    return 0


def _load_experiment(args) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config)
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    if args.seed is not None:
        config = replace(config, train=replace(config.train, seed=args.seed))
    return config


def cmd_train(args) -> int:
    config = _load_experiment(args)
    _, _, dataset = config.build()
    report = train(dataset, config.model, config.train)
    run_dir = Path(config.out_dir) / config.name
    write_report(report, run_dir, model_label=config.model.kind)
    print(f"best epoch {report.best_epoch} (val loss {report.best_val_loss:.6g})")
    for line in _metrics_lines(report.test_metrics):
        print(line)
    print(f"wrote report.json, metrics.csv, checkpoint.bin to {run_dir}")
    return 0


_SUMMARY_COLUMNS = ("model", "lambda", *METRIC_NAMES)


def cmd_sweep(args) -> int:
    config = _load_experiment(args)
    lambdas = _float_list(args.lambdas, "--lambdas")
    _, _, dataset = config.build()
    reports = lambda_sweep(dataset, config.model, config.train, lambdas)
    run_dir = Path(config.out_dir) / config.name
    rows = []
    for lam, report in zip(lambdas, reports):
        write_report(report, run_dir / f"lam-{lam:g}", model_label=config.model.kind)
        rows.append({"model": config.model.kind, "lambda": float(lam),
                     **report.test_metrics})
    rows.append({"model": "avg_window(n=1)", "lambda": "",
                 **baseline_metrics(dataset, window=1)})
    run_dir.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(run_dir / "summary.csv", rows, _SUMMARY_COLUMNS)
    print(f"wrote {len(rows)} summary rows to {run_dir / 'summary.csv'}")
    return 0


def cmd_noise_study(args) -> int:
    config = _load_experiment(args)
    if not isinstance(config.source, SynthSpec):
        raise ValueError("noise-study varies the synthetic noise level; "
                         "the config must use a synth data source")
    sigmas = _float_list(args.sigmas, "--sigmas")
    if any(s < 0 for s in sigmas):
        raise ValueError("--sigmas must be nonnegative")
    run_dir = Path(config.out_dir) / config.name
    rows = []
    for sigma in sigmas:
        cfg = replace(config, source=replace(config.source, noise_sigma=sigma))
        _, _, dataset = cfg.build()
        report = train(dataset, cfg.model, cfg.train)
        write_report(report, run_dir / f"sigma-{sigma:g}", model_label=cfg.model.kind)
        rows.append({"sigma": float(sigma), "mse": report.test_metrics["mse"],
                     "mim": report.test_metrics["mim"]})
        print(f"sigma={sigma:g}  MSE={report.test_metrics['mse']:.6g}  "
              f"MIM={report.test_metrics['mim']:.6g}")
    run_dir.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(run_dir / "summary.csv", rows, ("sigma", "mse", "mim"))
    print(f"wrote {len(rows)} summary rows to {run_dir / 'summary.csv'}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="antimimic",
                     description="Train small forecasters and diagnose copy-last behavior.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate the synthetic benchmark series as CSV")
    p.add_argument("--n", type=int, default=3000, help="number of points")
    p.add_argument("--dt", type=float, default=0.1, help="time step between points")
    p.add_argument("--sigma", type=float, default=0.5, help="noise standard deviation")
    p.add_argument("--mu", type=float, default=0.0, help="noise mean")
    p.add_argument("--trend", type=float, default=0.0, help="linear trend slope")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("diagnose",
                       help="score predictions against targets (first target row = anchor)")
    p.add_argument("targets", help="CSV of ground truth; row 1 after the header is the anchor")
    p.add_argument("predictions", help="CSV of predictions, one per remaining target row")
    p.add_argument("--target-column", default="0")
    p.add_argument("--prediction-column", default="0")
    p.add_argument("--out", default=None, help="optional CSV path for the metrics table")
    p.set_defaults(func=cmd_diagnose)

    for name, fn, extra in (
        ("train", cmd_train, None),
        ("sweep", cmd_sweep, "lambdas"),
        ("noise-study", cmd_noise_study, "sigmas"),
    ):
        p = sub.add_parser(name, help=f"run the {name} experiment described by a JSON config")
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--out", default=None, help="override the config's out_dir")
        p.add_argument("--seed", type=int, default=None, help="override the training seed")
        if extra == "lambdas":
            p.add_argument("--lambdas", required=True,
                           help="comma-separated penalty weights, e.g. 0,1,10,100")
        if extra == "sigmas":
            p.add_argument("--sigmas", required=True,
                           help="comma-separated noise levels, e.g. 0,0.01,0.1,0.25,0.5")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
