"""Dataset files, manifests and report serialization.

Score files start with a header line::

    sampling_rate_hz=<f> n=<count> resolution=<pointwise|windowed> [kind=<probability|binary>] [window_s=<s>]

followed by one decimal value per line. Annotation files hold one
``label,onset_s,duration_s`` record per line; ``#`` lines are comments.
The manifest is JSON::

    {"sampling_rate_hz": 1, "window_s": 30,
     "subjects": [{"subject_id": "S000", "fold": "train", "n_samples": 28800,
                   "annotations": "S000.csv", "scores": "S000.txt"}]}

Relative paths resolve against the manifest's directory.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from alpec.config import EvalConfig
from alpec.core import (
    FOLDS,
    EventAnnotation,
    MatchResult,
    ScoreSeries,
    SubjectRecord,
    ValidationError,
)
from alpec.metrics import MetricSet, Report, SubjectResult, ThresholdSweep, aggregate

DEFAULT_WINDOW_S = 30.0


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _header_fields(line: str, source: str) -> dict[str, str]:
    fields = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise ValidationError(f"{source}:1: malformed header token {token!r}")
        fields[key] = value
    missing = {"sampling_rate_hz", "n", "resolution"} - fields.keys()
    if missing:
        raise ValidationError(f"{source}:1: header lacks {', '.join(sorted(missing))}")
    unknown = fields.keys() - {"sampling_rate_hz", "n", "resolution", "kind", "window_s"}
    if unknown:
        raise ValidationError(f"{source}:1: unknown header key(s) {', '.join(sorted(unknown))}")
    return fields


def parse_scores(text: str, source: str = "<scores>", window_s: float | None = None) -> ScoreSeries:
    """Parse a score file; every diagnostic names ``source`` and the line."""
    lines = text.splitlines()
    if not lines:
        raise ValidationError(f"{source}:1: empty score file")
    fields = _header_fields(lines[0], source)
    try:
        f = float(fields["sampling_rate_hz"])
        n = int(fields["n"])
    except ValueError:
        raise ValidationError(f"{source}:1: malformed header {lines[0]!r}") from None
    resolution = fields["resolution"]
    if resolution not in ("pointwise", "windowed"):
        raise ValidationError(f"{source}:1: unknown resolution {resolution!r}")
    if not f > 0 or n < 1:
        raise ValidationError(f"{source}:1: sampling_rate_hz must be > 0 and n >= 1")
    if "window_s" in fields:
        window_s = float(fields["window_s"])
    if resolution == "windowed" and window_s is None:
        window_s = DEFAULT_WINDOW_S

    values = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise ValidationError(f"{source}:{lineno}: not a number: {line!r}") from None
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"{source}:{lineno}: value {line} outside [0, 1]")
        values.append(v)

    kind = fields.get("kind")
    if kind is None:
        binary = all(v in (0.0, 1.0) for v in values)
        kind = "binary" if resolution == "windowed" and binary else "probability"
    elif kind not in ("probability", "binary"):
        raise ValidationError(f"{source}:1: unknown kind {kind!r}")
    if kind == "binary":
        for lineno, v in enumerate(values, start=2):
            if v not in (0.0, 1.0):
                raise ValidationError(f"{source}:{lineno}: binary label {v} is not 0/1")

    series_window = window_s if resolution == "windowed" else None
    try:
        return ScoreSeries(np.array(values), resolution, f, n, kind=kind, window_s=series_window)
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None


def format_scores(scores: ScoreSeries) -> str:
    header = (
        f"sampling_rate_hz={scores.sampling_rate_hz!r} n={scores.n_samples} "
        f"resolution={scores.resolution} kind={scores.kind}"
    )
    if scores.window_s is not None:
        header += f" window_s={scores.window_s!r}"
    body = "\n".join(repr(float(v)) for v in scores.values)
    return header + "\n" + body + ("\n" if body else "")


def parse_annotations(text: str, subject_id: str, source: str = "<annotations>") -> list[EventAnnotation]:
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row = next(csv.reader([line]))
        if len(row) != 3:
            raise ValidationError(f"{source}:{lineno}: expected label,onset_s,duration_s")
        label, onset, duration = (c.strip() for c in row)
        try:
            events.append(EventAnnotation(subject_id, label, float(onset), float(duration)))
        except ValueError as exc:
            raise ValidationError(f"{source}:{lineno}: {exc}") from None
    return events


def format_annotations(events: Iterable[EventAnnotation]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for ev in events:
        writer.writerow([ev.label, repr(ev.onset_s), repr(ev.duration_s)])
    return buf.getvalue()


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read ({exc.strerror})") from None


def load_dataset(manifest_path: str | Path, window_s: float | None = None) -> list[SubjectRecord]:
    """Load and validate every subject listed in a manifest.

    ``window_s`` (or the manifest's ``window_s`` key) sets the window length
    used to validate windowed score files that do not state their own.
    """
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(_read(manifest_path))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{manifest_path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(manifest, dict) or not isinstance(manifest.get("subjects"), list):
        raise ValidationError(f"{manifest_path}: manifest needs a 'subjects' list")
    base = manifest_path.parent
    default_f = manifest.get("sampling_rate_hz")
    if window_s is None:
        window_s = manifest.get("window_s", DEFAULT_WINDOW_S)

    records = []
    seen: set[str] = set()
    for i, entry in enumerate(manifest["subjects"]):
        where = f"{manifest_path}: subjects[{i}]"
        try:
            sid = str(entry["subject_id"])
            fold = entry["fold"]
            ann_path = base / entry["annotations"]
            score_path = base / entry["scores"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{where}: missing field {exc}") from None
        if sid in seen:
            raise ValidationError(f"{where}: duplicate subject_id {sid!r}")
        seen.add(sid)
        if fold not in FOLDS:
            raise ValidationError(f"{where}: unknown fold {fold!r} (expected one of {', '.join(FOLDS)})")

        scores = parse_scores(_read(score_path), str(score_path), window_s)
        if default_f is not None and float(default_f) != scores.sampling_rate_hz:
            raise ValidationError(f"{score_path}:1: sampling rate differs from manifest ({default_f} Hz)")
        n = entry.get("n_samples", scores.n_samples)
        if n != scores.n_samples:
            raise ValidationError(f"{score_path}:1: n={scores.n_samples} but manifest says {n}")
        events = parse_annotations(_read(ann_path), sid, str(ann_path))
        try:
            records.append(SubjectRecord(sid, scores, events, fold, n, scores.sampling_rate_hz))
        except ValidationError as exc:
            raise ValidationError(f"{ann_path}: {exc}") from None
    return records


def write_dataset(subjects: Sequence[SubjectRecord], out_dir: str | Path) -> Path:
    """Write subjects plus ``manifest.json`` into ``out_dir``; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    rates = {s.sampling_rate_hz for s in subjects}
    windows = {s.scores.window_s for s in subjects if s.scores is not None and s.scores.window_s is not None}
    for sub in subjects:
        if sub.scores is None:
            raise ValidationError(f"subject {sub.subject_id!r} has no scores to write")
        ann_name, score_name = f"{sub.subject_id}.csv", f"{sub.subject_id}.scores.txt"
        (out_dir / ann_name).write_text(format_annotations(sub.events))
        (out_dir / score_name).write_text(format_scores(sub.scores))
        entries.append(
            {
                "subject_id": sub.subject_id,
                "fold": sub.fold,
                "n_samples": sub.n_samples,
                "annotations": ann_name,
                "scores": score_name,
            }
        )
    manifest: dict = {"subjects": entries}
    if len(rates) == 1:
        manifest["sampling_rate_hz"] = rates.pop()
    if len(windows) == 1:
        manifest["window_s"] = windows.pop()
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def report_to_dict(report: Report) -> dict:
    return {
        "t_opt": report.t_opt,
        "config": report.config.to_dict(),
        "aggregate": report.aggregate.as_dict(),
        "per_subject": [
            {
                "subject_id": r.subject_id,
                "tp": r.counts.tp,
                "fp": r.counts.fp,
                "fn": r.counts.fn,
                "matched_pairs": [list(p) for p in r.counts.matched_pairs],
                **r.metrics.as_dict(),
            }
            for r in report.per_subject
        ],
    }


def report_from_dict(data: dict) -> Report:
    per_subject = tuple(
        SubjectResult(
            row["subject_id"],
            MetricSet(row["precision"], row["recall"], row["f1"], row["f2"]),
            MatchResult(row["tp"], row["fp"], row["fn"], tuple(tuple(p) for p in row["matched_pairs"])),
        )
        for row in data["per_subject"]
    )
    agg = data["aggregate"]
    return Report(
        data["t_opt"],
        per_subject,
        MetricSet(agg["precision"], agg["recall"], agg["f1"], agg["f2"]),
        EvalConfig.from_dict(data["config"]),
    )


def _config_line(config: EvalConfig) -> str:
    return " ".join(f"{k}={v}" for k, v in config.to_dict().items())


def format_report_csv(report: Report) -> str:
    buf = io.StringIO()
    t_opt = "none" if report.t_opt is None else _fmt(report.t_opt)
    buf.write(f"# t_opt={t_opt}\n# config: {_config_line(report.config)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["subject_id", "tp", "fp", "fn", "precision", "recall", "f1", "f2"])
    rows = report.per_subject
    for r in rows:
        m = r.metrics
        writer.writerow(
            [r.subject_id, r.counts.tp, r.counts.fp, r.counts.fn]
            + [_fmt(v) for v in (m.precision, m.recall, m.f1, m.f2)]
        )
    means = [float(np.mean([getattr(r.counts, k) for r in rows])) for k in ("tp", "fp", "fn")]
    agg = aggregate([r.metrics for r in rows])
    writer.writerow(["mean"] + [_fmt(v) for v in means + list(agg.as_dict().values())])
    return buf.getvalue()


def write_report(report: Report, fmt: str, path: str | Path) -> None:
    """Serialize a report as ``json`` (complete) or ``csv`` (one row per subject)."""
    report.check_consistency()
    if fmt == "json":
        text = json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        text = format_report_csv(report)
    else:
        raise ValidationError(f"unknown report format {fmt!r}")
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ValidationError(f"{path}: cannot write report ({exc.strerror})") from None


def read_report(path: str | Path) -> Report:
    path = Path(path)
    try:
        return report_from_dict(json.loads(_read(path)))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: not a JSON report ({exc})") from None


def format_sweep_csv(sweep: ThresholdSweep, t_opt: float) -> str:
    lines = [f"# t_opt={_fmt(t_opt)}", "threshold,mean_f2"]
    lines += [f"{_fmt(t)},{_fmt(v)}" for t, v in zip(sweep.thresholds, sweep.mean_f2())]
    return "\n".join(lines) + "\n"


def format_table_csv(rows: Sequence[tuple], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else ("unbounded" if math.isinf(v) else _fmt(v)) for v in row])
    return buf.getvalue()
