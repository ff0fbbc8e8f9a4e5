"""Ground-truth target construction and the pointwise / window-based baselines."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from alpec.config import Alignment, Task
from alpec.core import (
    EventAnnotation,
    Interval,
    MatchResult,
    ValidationError,
    n_windows,
    to_samples,
)


def build_targets(
    events: Sequence[EventAnnotation],
    mode: Task,
    f: float,
    n: int,
    l: float = 10.0,  # noqa: E741
    alignment: Alignment = "centered",
) -> list[Interval]:
    """Ground-truth intervals for full-event, interval-onset or point-onset detection.

    * ``fed``: ``[onset, onset + duration)``; zero-length events occupy one sample.
    * ``iod``: an interval of ``l`` seconds centered on the onset, or starting
      at it when ``alignment="leading"``, clamped to ``[0, n)``.
    * ``pod``: the single onset sample.

    Raises :class:`ValidationError` listing every pair of events whose
    targets overlap.
    """
    if mode not in ("fed", "iod", "pod"):
        raise ValidationError(f"unknown task {mode!r}")
    if alignment not in ("centered", "leading"):
        raise ValidationError(f"unknown alignment {alignment!r}")
    ordered = sorted(events, key=lambda e: e.onset_s)
    length = to_samples(l, f)
    if mode == "iod" and length < 1:
        raise ValidationError(f"IOD interval of {l} s is shorter than one sample")

    targets: list[Interval] = []
    for ev in ordered:
        onset = min(to_samples(ev.onset_s, f), n - 1)
        if mode == "fed":
            start = onset
            end = max(to_samples(ev.onset_s + ev.duration_s, f), start + 1)
        elif mode == "iod":
            start = onset - length // 2 if alignment == "centered" else onset
            end = start + length
        else:
            start, end = onset, onset + 1
        targets.append(Interval(max(0, start), min(n, end)))

    clashes = [
        (ordered[i], ordered[i + 1])
        for i, (a, b) in enumerate(zip(targets, targets[1:]))
        if b.start < a.end
    ]
    if clashes:
        listing = "; ".join(
            f"{a.label}@{a.onset_s}s / {b.label}@{b.onset_s}s" for a, b in clashes
        )
        raise ValidationError(f"{len(clashes)} overlapping {mode} target pair(s): {listing}")
    return targets


def window_labels_presence(binary_pointwise: Sequence[int] | np.ndarray, s: float, f: float) -> np.ndarray:
    """Label each consecutive window 1 iff it contains any positive sample."""
    arr = np.asarray(binary_pointwise)
    window_len = to_samples(s, f)
    if window_len < 1:
        raise ValidationError(f"window of {s} s is shorter than one sample at {f} Hz")
    if arr.size == 0:
        return np.zeros(0, dtype=np.int8)
    starts = np.arange(0, arr.size, window_len)
    return (np.maximum.reduceat(arr != 0, starts)).astype(np.int8)


def _confusion(gt: np.ndarray, pred: np.ndarray) -> MatchResult:
    gt = np.asarray(gt) != 0
    pred = np.asarray(pred) != 0
    return MatchResult(
        tp=int(np.count_nonzero(gt & pred)),
        fp=int(np.count_nonzero(~gt & pred)),
        fn=int(np.count_nonzero(gt & ~pred)),
    )


def evaluate_pointwise(gt_binary: Sequence[int] | np.ndarray, pred_binary: Sequence[int] | np.ndarray) -> MatchResult:
    """Per-sample confusion counts (true negatives are not reported)."""
    gt = np.asarray(gt_binary)
    pred = np.asarray(pred_binary)
    if gt.shape != pred.shape:
        raise ValidationError(f"length mismatch: ground truth {gt.size}, prediction {pred.size}")
    return _confusion(gt, pred)


def evaluate_windowed(
    gt_binary: Sequence[int] | np.ndarray,
    pred: Sequence[int] | np.ndarray,
    s: float,
    f: float,
    pred_windowed: bool = False,
) -> MatchResult:
    """Per-window confusion counts under the presence criterion.

    ``pred`` is reduced to windows the same way as the ground truth unless
    ``pred_windowed`` says it already holds one label per window.
    """
    gt = np.asarray(gt_binary)
    gt_windows = window_labels_presence(gt, s, f)
    if pred_windowed:
        pred_windows = np.asarray(pred)
        expected = n_windows(gt.size, to_samples(s, f))
        if pred_windows.size != expected:
            raise ValidationError(
                f"window-count mismatch: prediction has {pred_windows.size}, expected {expected}"
            )
    else:
        pred = np.asarray(pred)
        if pred.size != gt.size:
            raise ValidationError(f"length mismatch: ground truth {gt.size}, prediction {pred.size}")
        pred_windows = window_labels_presence(pred, s, f)
    return _confusion(gt_windows, pred_windows)
