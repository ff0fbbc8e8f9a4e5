"""Value types shared by every evaluation scheme, plus interval extraction.

All positions are sample indices and all intervals are half-open
``[start, end)``. Seconds are converted to samples once, on ingestion,
through :func:`to_samples`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

Resolution = Literal["pointwise", "windowed"]
ScoreKind = Literal["probability", "binary"]
Fold = Literal["train", "validation", "test"]

FOLDS: tuple[str, ...] = ("train", "validation", "test")


class ValidationError(ValueError):
    """Raised when input data violates a documented contract."""


def to_samples(seconds: float, f: float) -> int:
    """Convert a duration or position in seconds to samples.

    Rounds to the nearest integer with ties away from zero.
    """
    x = seconds * f
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def n_windows(n: int, window_len: int) -> int:
    return -(-n // window_len)


@dataclass(frozen=True, slots=True, order=True)
class Interval:
    """Half-open range of sample indices ``[start, end)``."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValidationError(f"interval start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise ValidationError(f"interval end must exceed start, got [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    @classmethod
    def from_inclusive(cls, start: int, end: int) -> Interval:
        """Build from inclusive endpoints, as used in the ALPEC formulas."""
        return cls(start, end + 1)

    def to_inclusive(self) -> tuple[int, int]:
        return self.start, self.end - 1


def _frozen(values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScoreSeries:
    """Per-subject prediction stream.

    ``values`` holds pointwise probability scores, per-window probability
    scores, or binary window labels depending on ``resolution`` and ``kind``.
    For windowed series, ``window_s`` fixes the window length used to check
    the value count against ``n_samples``.
    """

    values: np.ndarray
    resolution: Resolution
    sampling_rate_hz: float
    n_samples: int
    kind: ScoreKind = "probability"
    window_s: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values))
        if self.resolution not in ("pointwise", "windowed"):
            raise ValidationError(f"unknown resolution {self.resolution!r}")
        if self.kind not in ("probability", "binary"):
            raise ValidationError(f"unknown score kind {self.kind!r}")
        if not self.sampling_rate_hz > 0:
            raise ValidationError(f"sampling rate must be positive, got {self.sampling_rate_hz}")
        if self.n_samples < 1:
            raise ValidationError(f"n_samples must be >= 1, got {self.n_samples}")
        v = self.values
        if v.ndim != 1:
            raise ValidationError("score values must be one-dimensional")
        bad = np.flatnonzero(~((v >= 0.0) & (v <= 1.0)))
        if bad.size:
            raise ValidationError(f"score value {v[bad[0]]!r} at index {bad[0]} outside [0, 1]")
        if self.kind == "binary":
            bad = np.flatnonzero((v != 0.0) & (v != 1.0))
            if bad.size:
                raise ValidationError(f"binary label {v[bad[0]]!r} at index {bad[0]} is not 0/1")
        expected = self.expected_length()
        if expected is not None and v.size != expected:
            raise ValidationError(
                f"{self.resolution} series has {v.size} values, expected {expected}"
            )

    def expected_length(self) -> int | None:
        if self.resolution == "pointwise":
            return self.n_samples
        if self.window_s is None:
            return None
        return n_windows(self.n_samples, self.window_len())

    def window_len(self) -> int:
        if self.window_s is None:
            raise ValidationError("windowed series needs window_s")
        length = to_samples(self.window_s, self.sampling_rate_hz)
        if length < 1:
            raise ValidationError(f"window of {self.window_s} s is shorter than one sample")
        return length

    @property
    def is_binary_windows(self) -> bool:
        """True for binary per-window labels, which skip thresholding."""
        return self.resolution == "windowed" and self.kind == "binary"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScoreSeries):
            return NotImplemented
        return (
            self.resolution == other.resolution
            and self.kind == other.kind
            and self.sampling_rate_hz == other.sampling_rate_hz
            and self.n_samples == other.n_samples
            and self.window_s == other.window_s
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, slots=True)
class EventAnnotation:
    subject_id: str
    label: str
    onset_s: float
    duration_s: float

    def __post_init__(self) -> None:
        if self.onset_s < 0 or self.duration_s < 0:
            raise ValidationError(
                f"event {self.label!r} of {self.subject_id!r} has negative onset or duration"
            )


@dataclass(frozen=True)
class SubjectRecord:
    subject_id: str
    scores: ScoreSeries | None
    events: tuple[EventAnnotation, ...]
    fold: Fold
    n_samples: int
    sampling_rate_hz: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        if self.fold not in FOLDS:
            raise ValidationError(f"subject {self.subject_id!r}: unknown fold {self.fold!r}")
        if self.scores is not None:
            if self.scores.n_samples != self.n_samples:
                raise ValidationError(
                    f"subject {self.subject_id!r}: scores cover {self.scores.n_samples} samples, "
                    f"record has {self.n_samples}"
                )
            if self.scores.sampling_rate_hz != self.sampling_rate_hz:
                raise ValidationError(f"subject {self.subject_id!r}: sampling rate mismatch")
        duration = self.n_samples / self.sampling_rate_hz
        for ev in self.events:
            if ev.onset_s + ev.duration_s > duration + 1e-9:
                raise ValidationError(
                    f"subject {self.subject_id!r}: event at {ev.onset_s} s "
                    f"(+{ev.duration_s} s) runs past the recording end ({duration} s)"
                )

    def with_scores(self, scores: ScoreSeries) -> SubjectRecord:
        return SubjectRecord(
            self.subject_id, scores, self.events, self.fold, self.n_samples, self.sampling_rate_hz
        )


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    matched_pairs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "matched_pairs", tuple(tuple(p) for p in self.matched_pairs))
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValidationError(f"negative count in {self}")


def extract_intervals(binary: Sequence[int] | np.ndarray) -> list[Interval]:
    """Return the maximal runs of ones as sorted, disjoint intervals.

    >>> extract_intervals([0, 1, 1, 0, 1])
    [Interval(start=1, end=3), Interval(start=4, end=5)]
    """
    arr = np.asarray(binary)
    if arr.ndim != 1:
        raise ValidationError("binary sequence must be one-dimensional")
    bad = np.flatnonzero((arr != 0) & (arr != 1))
    if bad.size:
        raise ValidationError(f"non-binary value {arr[bad[0]]!r} at index {bad[0]}")
    padded = np.concatenate(([0], arr.astype(np.int8), [0]))
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [Interval(int(s), int(e)) for s, e in zip(starts, ends)]


def rasterize(intervals: Sequence[Interval], n: int) -> np.ndarray:
    """Inverse of :func:`extract_intervals` for a sequence of length ``n``."""
    out = np.zeros(n, dtype=np.int8)
    for iv in intervals:
        out[iv.start : min(iv.end, n)] = 1
    return out


def overlaps(a: Interval, b: Interval) -> bool:
    """True iff the two half-open intervals share at least one sample."""
    return a.start < b.end and a.end > b.start
