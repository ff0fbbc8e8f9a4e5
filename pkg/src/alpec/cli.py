"""Command-line entry point: ``alpec {evaluate,sweep,ablate,synth,report}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from alpec.ablation import ABLATION_PARAMS, run_ablation
from alpec.config import SCHEMES, TASKS, load_config, parse_duration
from alpec.core import ValidationError
from alpec.fileio import (
    format_sweep_csv,
    format_table_csv,
    load_dataset,
    read_report,
    write_dataset,
    write_report,
)
from alpec.metrics import evaluate, select_threshold, sweep_thresholds
from alpec.synth import PredictorKind, SynthParams, synthesize


def _load(args: argparse.Namespace):
    config = load_config(args.config)
    overrides = {k: getattr(args, k, None) for k in ("scheme", "task")}
    config = config.replace(**{k: v for k, v in overrides.items() if v is not None})
    dataset = load_dataset(args.manifest, window_s=config.s)
    return dataset, config


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ValidationError(f"{path}: cannot write ({exc.strerror})") from None


def cmd_evaluate(args: argparse.Namespace) -> None:
    dataset, config = _load(args)
    report = evaluate(dataset, config)
    write_report(report, args.format, args.out)
    agg = report.aggregate
    t = "none" if report.t_opt is None else f"{report.t_opt:.2f}"
    print(
        f"{config.scheme}/{config.task}: t_opt={t} precision={agg.precision:.3f} "
        f"recall={agg.recall:.3f} f2={agg.f2:.3f} ({len(report.per_subject)} subjects)"
    )


def cmd_sweep(args: argparse.Namespace) -> None:
    dataset, config = _load(args)
    train = [s for s in dataset if s.fold == "train"]
    sweep = sweep_thresholds(train, config)
    t_opt = select_threshold(sweep)
    _write(args.out, format_sweep_csv(sweep, t_opt))
    print(f"t_opt={t_opt:.2f} mean_f2={sweep.mean_f2().max():.3f} over {len(train)} train subjects")


def cmd_ablate(args: argparse.Namespace) -> None:
    dataset, config = _load(args)
    try:
        values = [parse_duration(v, args.param) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"--values: {exc}") from None
    rows = run_ablation(dataset, config, args.param, values)
    table = [(r.value, r.precision, r.recall, r.f2) for r in rows]
    _write(args.out, format_table_csv(table, [args.param, "precision", "recall", "f2"]))
    for r in rows:
        print(f"{args.param}={r.value:g}  precision={r.precision:.2f} recall={r.recall:.2f} f2={r.f2:.2f}")


def _arousals(text: str) -> int | tuple[int, int]:
    low, sep, high = text.partition("-")
    return (int(low), int(high)) if sep else int(low)


def cmd_synth(args: argparse.Namespace) -> None:
    params = SynthParams(
        n_subjects=args.subjects,
        night_length_s=args.night_s,
        f=args.f,
        arousals_per_subject=args.arousals,
        min_onset_gap_s=args.min_gap,
        seed=args.seed,
        train_fraction=args.train_fraction,
    )
    kind = PredictorKind.parse(args.predictor)
    subjects = synthesize(params, kind, s=args.window_s)
    manifest = write_dataset(subjects, args.out_dir)
    print(f"wrote {len(subjects)} subjects to {manifest}")


def cmd_report(args: argparse.Namespace) -> None:
    write_report(read_report(args.input), args.format, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alpec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--manifest", required=True, help="dataset manifest (JSON)")
        p.add_argument("--config", help="key=value config file; built-in defaults when omitted")
        p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="threshold on train, score held-out subjects")
    data_args(p)
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--task", choices=TASKS)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="subject-mean F2 per threshold on the train fold")
    data_args(p)
    p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--task", choices=TASKS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablate", help="re-evaluate over values of one hyperparameter")
    data_args(p)
    p.add_argument("--param", choices=ABLATION_PARAMS, required=True)
    p.add_argument("--values", required=True, help="comma list, e.g. 0,5,10,15")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("synth", help="write a synthetic dataset with a baseline predictor")
    p.add_argument("--subjects", type=int, default=20)
    p.add_argument("--night-s", type=float, default=28800.0)
    p.add_argument("--arousals", type=_arousals, default=167, help="count or low-high range")
    p.add_argument("--predictor", default="jittered_oracle", help="e.g. constant1, jittered_oracle:jitter=12")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f", type=float, default=1.0)
    p.add_argument("--min-gap", type=float, default=13.0)
    p.add_argument("--window-s", type=float, default=30.0)
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="re-serialize a JSON report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
