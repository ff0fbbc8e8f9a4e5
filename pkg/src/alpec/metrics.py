"""Precision/recall/F-beta, threshold selection and subject-level evaluation."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from alpec.config import THRESHOLDS, EvalConfig
from alpec.core import (
    MatchResult,
    ScoreSeries,
    SubjectRecord,
    ValidationError,
    rasterize,
)
from alpec.matching import MatchConfig, extend_ground_truth, match_and_count
from alpec.postproc import binarize, pointwise_scores, post_process, threshold
from alpec.schemes import build_targets, evaluate_pointwise, evaluate_windowed

T = TypeVar("T")
R = TypeVar("R")

EVAL_FOLDS = ("validation", "test")


@dataclass(frozen=True)
class MetricSet:
    precision: float
    recall: float
    f1: float
    f2: float

    def as_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "f2": self.f2}


def f_beta(precision: float, recall: float, beta: float) -> float:
    b2 = beta * beta
    denom = b2 * precision + recall
    if denom == 0:
        return 0.0
    return (1 + b2) * precision * recall / denom


def compute_metrics(counts: MatchResult | tuple[int, int, int]) -> MetricSet:
    """Precision, recall, F1 and F2 from TP/FP/FN counts.

    An empty side of a ratio gives 0, except when all three counts are 0:
    nothing to find and nothing predicted scores a perfect 1.
    """
    if isinstance(counts, MatchResult):
        tp, fp, fn = counts.tp, counts.fp, counts.fn
    else:
        tp, fp, fn = counts
    if min(tp, fp, fn) < 0:
        raise ValidationError(f"counts must be >= 0, got tp={tp} fp={fp} fn={fn}")
    if tp == fp == fn == 0:
        return MetricSet(1.0, 1.0, 1.0, 1.0)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return MetricSet(precision, recall, f_beta(precision, recall, 1.0), f_beta(precision, recall, 2.0))


@dataclass(frozen=True)
class ThresholdSweep:
    """Per-subject F2 over the threshold grid (rows: subjects)."""

    thresholds: tuple[float, ...]
    per_subject_f2: np.ndarray
    subject_ids: tuple[str, ...] = ()

    def mean_f2(self) -> np.ndarray:
        return np.asarray(self.per_subject_f2, dtype=float).mean(axis=0)


def select_threshold(sweep: ThresholdSweep) -> float:
    """Grid threshold with the highest subject-mean F2; ties go to the smallest."""
    f2 = np.asarray(sweep.per_subject_f2, dtype=float)
    if f2.ndim != 2 or f2.shape[0] == 0:
        raise ValidationError("threshold selection needs at least one training subject")
    if f2.shape[1] != len(sweep.thresholds) or not sweep.thresholds:
        raise ValidationError("sweep matrix does not match the threshold grid")
    order = np.argsort(sweep.thresholds, kind="stable")
    means = f2.mean(axis=0)[order]
    return float(np.asarray(sweep.thresholds)[order][int(np.argmax(means))])


@dataclass(frozen=True)
class SubjectResult:
    subject_id: str
    metrics: MetricSet
    counts: MatchResult


@dataclass(frozen=True)
class Report:
    t_opt: float | None
    per_subject: tuple[SubjectResult, ...]
    aggregate: MetricSet
    config: EvalConfig

    def check_consistency(self, atol: float = 1e-12) -> None:
        expected = aggregate([r.metrics for r in self.per_subject])
        for name, value in expected.as_dict().items():
            if abs(getattr(self.aggregate, name) - value) > atol:
                raise ValidationError(f"aggregate {name} does not equal the subject mean")


def aggregate(metric_sets: Sequence[MetricSet]) -> MetricSet:
    if not metric_sets:
        raise ValidationError("nothing to aggregate")
    return MetricSet(*(float(np.mean([getattr(m, k) for m in metric_sets])) for k in ("precision", "recall", "f1", "f2")))


def worker_count() -> int:
    raw = os.environ.get("ALPEC_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValidationError(f"ALPEC_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Ordered map, threaded up to ``ALPEC_THREADS`` workers."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class SubjectScorer:
    """Counts for one subject at any threshold under the configured scheme.

    Targets, buffering and smoothing are computed once so that a sweep
    over the grid only repeats thresholding and counting.
    """

    def __init__(self, subject: SubjectRecord, config: EvalConfig):
        if subject.scores is None:
            raise ValidationError(f"subject {subject.subject_id!r} has no scores")
        self.subject = subject
        self.config = config
        self.scores: ScoreSeries = subject.scores
        f = subject.sampling_rate_hz
        n = subject.n_samples
        self.targets = build_targets(
            subject.events, config.task, f, n, l=config.l, alignment=config.iod_alignment
        )
        if self.scores.resolution == "windowed" and self.scores.window_s not in (None, config.s):
            if config.scheme == "we":
                raise ValidationError(
                    f"subject {subject.subject_id!r}: predictions use {self.scores.window_s} s "
                    f"windows but the evaluation uses s={config.s}"
                )
        self.smoothed = pointwise_scores(subject, config)
        if config.scheme == "alpec":
            self.match_cfg = MatchConfig(
                f=f, n=n, b_before=config.b_before, b_after=config.b_after, d=config.d
            )
            self.gt_ext = extend_ground_truth(self.targets, self.match_cfg)
        else:
            self.gt_binary = rasterize(self.targets, n)

    def counts(self, t: float | None) -> MatchResult:
        cfg = self.config
        if cfg.scheme == "alpec":
            pred = post_process(self.subject, t, cfg, smoothed=self.smoothed)
            return match_and_count(self.gt_ext, pred, self.match_cfg)
        f = self.subject.sampling_rate_hz
        if cfg.scheme == "pe":
            pred = binarize(self.subject, None, cfg) if t is None else threshold(self.smoothed, t)
            return evaluate_pointwise(self.gt_binary, pred)
        if self.scores.resolution == "windowed":
            labels = self.scores.values if t is None else threshold(self.scores, t)
            return evaluate_windowed(self.gt_binary, labels, cfg.s, f, pred_windowed=True)
        return evaluate_windowed(self.gt_binary, threshold(self.smoothed, t), cfg.s, f)

    def f2_row(self, thresholds: Sequence[float]) -> np.ndarray:
        return np.array([compute_metrics(self.counts(t)).f2 for t in thresholds])


def _uses_binary_labels(subjects: Sequence[SubjectRecord]) -> bool:
    flags = {s.scores.is_binary_windows for s in subjects if s.scores is not None}
    if len(flags) > 1:
        raise ValidationError("dataset mixes binary window labels with probability scores")
    return flags == {True}


def _check_scores(subjects: Sequence[SubjectRecord]) -> None:
    for s in subjects:
        if s.scores is None:
            raise ValidationError(f"subject {s.subject_id!r} has no scores")


def sweep_thresholds(
    subjects: Sequence[SubjectRecord], config: EvalConfig, thresholds: Sequence[float] = THRESHOLDS
) -> ThresholdSweep:
    """F2 of every subject at every grid threshold."""
    if not subjects:
        raise ValidationError("threshold sweep needs at least one training subject")
    _check_scores(subjects)
    rows = parallel_map(lambda s: SubjectScorer(s, config).f2_row(thresholds), subjects)
    return ThresholdSweep(
        tuple(thresholds), np.vstack(rows), tuple(s.subject_id for s in subjects)
    )


def evaluate(
    dataset: Sequence[SubjectRecord],
    config: EvalConfig,
    eval_folds: Sequence[str] = EVAL_FOLDS,
) -> Report:
    """Choose a threshold on the train fold, then score every held-out subject.

    The threshold policy is identical for all schemes; only the counting
    differs. Binary window labels are used as-is (``t_opt`` is ``None``).
    """
    _check_scores(dataset)
    ids = [s.subject_id for s in dataset]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate subject_id in dataset")
    held_out = [s for s in dataset if s.fold in eval_folds]
    if not held_out:
        raise ValidationError(f"no subjects in evaluation folds {tuple(eval_folds)}")

    if _uses_binary_labels(dataset):
        t_opt = None
    else:
        train = [s for s in dataset if s.fold == "train"]
        if not train:
            raise ValidationError("probability scores need a non-empty train fold")
        t_opt = select_threshold(sweep_thresholds(train, config))

    def score(subject: SubjectRecord) -> SubjectResult:
        counts = SubjectScorer(subject, config).counts(t_opt)
        return SubjectResult(subject.subject_id, compute_metrics(counts), counts)

    results = tuple(parallel_map(score, held_out))
    report = Report(t_opt, results, aggregate([r.metrics for r in results]), config)
    report.check_consistency()
    return report


def evaluate_alpec(
    dataset: Sequence[SubjectRecord],
    config: EvalConfig,
    eval_folds: Sequence[str] = EVAL_FOLDS,
) -> Report:
    """:func:`evaluate` with the counting scheme pinned to ALPEC."""
    return evaluate(dataset, config.replace(scheme="alpec"), eval_folds)
