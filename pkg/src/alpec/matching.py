"""Ground-truth buffering and greedy one-to-one event counting."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from alpec.core import Interval, MatchResult, ValidationError, to_samples


@dataclass(frozen=True)
class MatchConfig:
    """Matching tolerances in seconds; ``d=inf`` means unbounded duration."""

    f: float
    n: int
    b_before: float = 15.0
    b_after: float = 15.0
    d: float = 60.0

    def __post_init__(self) -> None:
        if not self.f > 0:
            raise ValidationError(f"sampling rate must be positive, got {self.f}")
        if self.b_before < 0 or self.b_after < 0:
            raise ValidationError("buffers must be >= 0")
        if not self.d > 0:
            raise ValidationError(f"maximum duration must be > 0, got {self.d}")

    @property
    def max_len(self) -> float:
        return math.inf if math.isinf(self.d) else self.d * self.f

    def eligible(self, iv: Interval) -> bool:
        return iv.length <= self.max_len


def extend_ground_truth(gt: Sequence[Interval], cfg: MatchConfig) -> list[Interval]:
    """Pad each ground-truth interval by the buffers, clamped to ``[0, n)``.

    Extended intervals keep their order and are not re-merged even when
    they overlap.
    """
    before = to_samples(cfg.b_before, cfg.f)
    after = to_samples(cfg.b_after, cfg.f)
    return [Interval(max(0, g.start - before), min(cfg.n, g.end + after)) for g in gt]


def _check_sorted(gt_ext: Sequence[Interval], pred: Sequence[Interval]) -> None:
    for a, b in zip(gt_ext, gt_ext[1:]):
        if b.start < a.start:
            raise ValidationError("ground-truth intervals must be sorted by start")
    for a, b in zip(pred, pred[1:]):
        if b.start < a.end:
            raise ValidationError("predicted intervals must be sorted and disjoint")


def match_and_count(
    gt_ext: Sequence[Interval], pred: Sequence[Interval], cfg: MatchConfig
) -> MatchResult:
    """Count TP/FP/FN under the greedy rule.

    Each (extended) ground-truth interval, in order, claims the earliest
    unclaimed prediction that overlaps it and is no longer than ``d``.
    Unclaimed ground truths are FN, unclaimed predictions are FP.
    """
    _check_sorted(gt_ext, pred)
    starts = [p.start for p in pred]
    # disjoint and sorted, so ends ascend too
    ends = [p.end for p in pred]
    max_len = cfg.max_len
    taken = [False] * len(pred)
    pairs: list[tuple[int, int]] = []
    for gi, g in enumerate(gt_ext):
        lo = bisect.bisect_right(ends, g.start)
        hi = bisect.bisect_left(starts, g.end)
        for pi in range(lo, hi):
            if not taken[pi] and ends[pi] - starts[pi] <= max_len:
                taken[pi] = True
                pairs.append((gi, pi))
                break
    tp = len(pairs)
    return MatchResult(tp=tp, fp=len(pred) - tp, fn=len(gt_ext) - tp, matched_pairs=tuple(pairs))


def reference_match_oracle(
    gt_ext: Sequence[Interval], pred: Sequence[Interval], cfg: MatchConfig
) -> MatchResult:
    """Slow restatement of :func:`match_and_count` for cross-checking.

    Builds the full overlap matrix from inclusive endpoints and simulates
    the claiming sequence with an explicit set.
    """
    for a, b in zip(gt_ext, gt_ext[1:]):
        if b.start < a.start:
            raise ValidationError("ground-truth intervals must be sorted by start")
    for a, b in zip(pred, pred[1:]):
        if b.start < a.end:
            raise ValidationError("predicted intervals must be sorted and disjoint")

    g = np.array([[iv.start, iv.end - 1] for iv in gt_ext], dtype=np.int64).reshape(-1, 2)
    p = np.array([[iv.start, iv.end - 1] for iv in pred], dtype=np.int64).reshape(-1, 2)
    # inclusive form: P.start <= G.end and P.end >= G.start
    hit = (p[None, :, 0] <= g[:, None, 1]) & (p[None, :, 1] >= g[:, None, 0])
    lengths = p[:, 1] - p[:, 0] + 1
    if cfg.d != math.inf:
        hit &= (lengths <= cfg.d * cfg.f)[None, :]

    claimed: set[int] = set()
    pairs = []
    tp = fn = 0
    for gi in range(len(gt_ext)):
        candidates = [pi for pi in np.flatnonzero(hit[gi]) if pi not in claimed]
        if candidates:
            first = min(candidates, key=lambda k: (p[k, 0], k))
            claimed.add(int(first))
            pairs.append((gi, int(first)))
            tp += 1
        else:
            fn += 1
    fp = sum(1 for pi in range(len(pred)) if pi not in claimed)
    return MatchResult(tp=tp, fp=fp, fn=fn, matched_pairs=tuple(pairs))
