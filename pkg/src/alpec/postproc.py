"""Prediction post-processing: smoothing, thresholding, resampling, merging."""

from __future__ import annotations

from typing import Literal, Sequence

import numpy as np

from alpec.config import EvalConfig
from alpec.core import (
    Interval,
    ScoreSeries,
    SubjectRecord,
    ValidationError,
    extract_intervals,
    n_windows,
    to_samples,
)

MergeMode = Literal["onset_maxima", "endpoint_gap"]
MERGE_MODES = ("onset_maxima", "endpoint_gap")


def smooth_scores(scores: ScoreSeries, w: float, f: float | None = None) -> ScoreSeries:
    """Centered moving average over ``round(w * f)`` samples.

    Near the sequence edges the window shrinks to the samples that exist.
    For even window lengths the extra sample sits to the right of center.
    """
    if scores.resolution != "pointwise":
        raise ValidationError("smoothing applies only to pointwise scores")
    if w < 0:
        raise ValidationError(f"smoothing window must be >= 0, got {w}")
    f = scores.sampling_rate_hz if f is None else f
    if w == 0:
        return scores
    L = to_samples(w, f)
    if L < 1:
        raise ValidationError(f"smoothing window of {w} s is shorter than one sample at {f} Hz")
    v = scores.values
    n = v.size
    csum = np.concatenate(([0.0], np.cumsum(v)))
    idx = np.arange(n)
    lo = np.maximum(idx - (L - 1) // 2, 0)
    hi = np.minimum(idx + L // 2 + 1, n)
    smoothed = (csum[hi] - csum[lo]) / (hi - lo)
    # cumulative sums can drift a few ulps outside [0, 1]
    np.clip(smoothed, 0.0, 1.0, out=smoothed)
    return ScoreSeries(
        smoothed,
        "pointwise",
        scores.sampling_rate_hz,
        scores.n_samples,
        kind="probability",
        window_s=scores.window_s,
    )


def threshold(scores: ScoreSeries | np.ndarray | Sequence[float], t: float) -> np.ndarray:
    """Binary labels: 1 where the score is >= ``t``."""
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"threshold must lie in [0, 1], got {t}")
    values = scores.values if isinstance(scores, ScoreSeries) else np.asarray(scores, dtype=float)
    return (values >= t).astype(np.int8)


def expand_window_labels(
    window_labels: Sequence[float] | np.ndarray, s: float, f: float, n: int
) -> np.ndarray:
    """Give every sample the value of the window it falls in.

    Works for binary labels and per-window scores alike. The last window
    may be partial.
    """
    labels = np.asarray(window_labels)
    window_len = to_samples(s, f)
    if window_len < 1:
        raise ValidationError(f"window of {s} s is shorter than one sample at {f} Hz")
    expected = n_windows(n, window_len)
    if labels.size != expected:
        raise ValidationError(
            f"got {labels.size} window labels, expected {expected} for n={n}, s={s}, f={f}"
        )
    return np.repeat(labels, window_len)[:n]


def _argmax(values: np.ndarray, iv: Interval) -> int:
    # np.argmax returns the first (smallest) index among ties
    return iv.start + int(np.argmax(values[iv.start : iv.end]))


def _peaks(values: np.ndarray, intervals: Sequence[Interval]) -> np.ndarray:
    """Smallest index of the maximum score inside each interval, vectorized."""
    starts = np.fromiter((iv.start for iv in intervals), dtype=np.int64, count=len(intervals))
    lengths = np.fromiter((iv.length for iv in intervals), dtype=np.int64, count=len(intervals))
    offsets = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    idx = np.arange(lengths.sum()) + np.repeat(starts - offsets, lengths)
    vals = values[idx]
    at_max = vals == np.repeat(np.maximum.reduceat(vals, offsets), lengths)
    hits = np.flatnonzero(at_max)
    group = np.repeat(np.arange(len(intervals)), lengths)[hits]
    _, first = np.unique(group, return_index=True)
    return idx[hits[first]]


def merge_intervals(
    intervals: Sequence[Interval],
    scores: ScoreSeries | np.ndarray | None,
    delta: float,
    f: float,
    mode: MergeMode,
) -> list[Interval]:
    """Fuse neighbouring intervals closer than ``delta`` seconds.

    ``endpoint_gap`` measures the gap ``next.start - current.end``.
    ``onset_maxima`` measures the distance between the score maxima of the
    two intervals; after each merge the maximum is recomputed over the
    merged extent before looking at the next interval.
    """
    if mode not in MERGE_MODES:
        raise ValidationError(f"unknown merge mode {mode!r}")
    if delta < 0:
        raise ValidationError(f"merge distance must be >= 0, got {delta}")
    if not intervals:
        return []
    for prev, nxt in zip(intervals, intervals[1:]):
        if nxt.start < prev.end:
            raise ValidationError("intervals must be sorted and disjoint")
    limit = delta * f

    if mode == "endpoint_gap":
        merged = []
        current = intervals[0]
        for nxt in intervals[1:]:
            if nxt.start - current.end < limit:
                current = Interval(current.start, nxt.end)
            else:
                merged.append(current)
                current = nxt
        merged.append(current)
        return merged

    if scores is None:
        raise ValidationError("onset_maxima merging needs the pointwise score series")
    values = scores.values if isinstance(scores, ScoreSeries) else np.asarray(scores, dtype=float)
    if intervals[-1].end > values.size:
        raise ValidationError("score series does not cover all intervals")
    peaks = _peaks(values, intervals).tolist()
    merged = []
    current = intervals[0]
    peak = peaks[0]
    for nxt, nxt_peak in zip(intervals[1:], peaks[1:]):
        if abs(peak - nxt_peak) < limit:
            current = Interval(current.start, nxt.end)
            peak = _argmax(values, current)
        else:
            merged.append(current)
            current = nxt
            peak = nxt_peak
    merged.append(current)
    return merged


def pointwise_scores(subject: SubjectRecord, config: EvalConfig) -> ScoreSeries:
    """The subject's scores at sample resolution, smoothed if configured.

    Windowed scores are expanded block-wise and are never smoothed.
    """
    scores = subject.scores
    if scores is None:
        raise ValidationError(f"subject {subject.subject_id!r} has no scores")
    f = scores.sampling_rate_hz
    if config.f is not None and config.f != f:
        raise ValidationError(
            f"subject {subject.subject_id!r}: sampled at {f} Hz, config says {config.f} Hz"
        )
    if scores.resolution == "windowed":
        expanded = expand_window_labels(scores.values, _window_s(scores, config), f, scores.n_samples)
        return ScoreSeries(expanded, "pointwise", f, scores.n_samples, kind=scores.kind)
    if config.w > 0:
        return smooth_scores(scores, config.w, f)
    return scores


def _window_s(scores: ScoreSeries, config: EvalConfig) -> float:
    return scores.window_s if scores.window_s is not None else config.s


def binarize(subject: SubjectRecord, t: float | None, config: EvalConfig) -> np.ndarray:
    """Smooth, threshold and resample to pointwise binary predictions."""
    scores = subject.scores
    if scores is None:
        raise ValidationError(f"subject {subject.subject_id!r} has no scores")
    if t is None:
        if not scores.is_binary_windows:
            raise ValidationError(
                f"subject {subject.subject_id!r}: threshold may only be omitted for binary window labels"
            )
        return expand_window_labels(
            scores.values.astype(np.int8), _window_s(scores, config), scores.sampling_rate_hz, scores.n_samples
        )
    return threshold(pointwise_scores(subject, config), t)


def post_process(
    subject: SubjectRecord,
    t: float | None,
    config: EvalConfig,
    *,
    smoothed: ScoreSeries | None = None,
) -> list[Interval]:
    """Turn one subject's scores into merged predicted intervals.

    ``smoothed`` lets a threshold sweep pass in the result of
    :func:`pointwise_scores` so smoothing runs once per subject.
    """
    scores = subject.scores
    if scores is None:
        raise ValidationError(f"subject {subject.subject_id!r} has no scores")
    if smoothed is None:
        smoothed = pointwise_scores(subject, config)
    if t is None:
        binary = binarize(subject, None, config)
    else:
        binary = threshold(smoothed, t)
    intervals = extract_intervals(binary)
    return merge_intervals(
        intervals, smoothed, config.delta, scores.sampling_rate_hz, config.merge_mode
    )
