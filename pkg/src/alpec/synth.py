"""Deterministic synthetic subjects and naive/controlled predictors.

Every random draw comes from numpy's PCG64 generator seeded with
``SeedSequence([seed, subject_index])`` (predictors add a stream tag), so
each subject is reproducible on its own (predictor streams are keyed by
the CRC-32 of the subject id) and serial or parallel generation
yields identical datasets.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from alpec.config import Task
from alpec.core import (
    EventAnnotation,
    Interval,
    ScoreSeries,
    SubjectRecord,
    ValidationError,
    n_windows,
    rasterize,
    to_samples,
)
from alpec.schemes import build_targets, window_labels_presence

EVENT_DURATION_S = 3.0
_PREDICT_STREAM = 0x5052  # separates predictor draws from onset placement


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


@dataclass(frozen=True)
class SynthParams:
    """``arousals_per_subject`` is a count or an inclusive ``(low, high)`` range."""

    n_subjects: int = 20
    night_length_s: float = 28800.0
    f: float = 1.0
    arousals_per_subject: int | tuple[int, int] = 167
    min_onset_gap_s: float = 13.0
    seed: int = 0
    train_fraction: float = 0.5
    label: str = "arousal"

    def __post_init__(self) -> None:
        if self.n_subjects < 1:
            raise ValidationError("n_subjects must be >= 1")
        if not self.f > 0 or not self.night_length_s > 0:
            raise ValidationError("f and night_length_s must be positive")
        if not 0.0 <= self.train_fraction <= 1.0:
            raise ValidationError("train_fraction must lie in [0, 1]")
        if self.min_onset_gap_s < 0:
            raise ValidationError("min_onset_gap_s must be >= 0")

    @property
    def n_samples(self) -> int:
        return to_samples(self.night_length_s, self.f)


def arousals_for_window_prior(prior: float, night_length_s: float, s: float = 30.0) -> int:
    """Arousal count whose onsets mark about ``prior`` of the ``s``-second windows.

    Inverts the occupancy of uniformly scattered onsets,
    ``1 - exp(-count / windows)``.
    """
    if not 0.0 <= prior < 1.0:
        raise ValidationError("prior must lie in [0, 1)")
    windows = math.ceil(night_length_s / s)
    return round(-math.log1p(-prior) * windows)


def _fold(params: SynthParams, index: int) -> str:
    return "train" if index < round(params.n_subjects * params.train_fraction) else "validation"


def generate_subject(params: SynthParams, subject_index: int) -> SubjectRecord:
    """One subject with uniformly placed, gap-respecting 3-second arousals.

    Onsets sit on whole samples; consecutive onsets are at least
    ``min_onset_gap_s`` apart and every event ends inside the night.
    The returned record has no scores; see :func:`predict`.
    """
    rng = rng_for(params.seed, subject_index)
    count = params.arousals_per_subject
    if not isinstance(count, int):
        low, high = count
        count = int(rng.integers(low, high + 1))
    if count < 0:
        raise ValidationError("arousal count must be >= 0")
    n = params.n_samples
    f = params.f
    gap = to_samples(params.min_onset_gap_s, f)
    last_onset = n - to_samples(EVENT_DURATION_S, f)
    if count * params.min_onset_gap_s >= params.night_length_s or (
        count and (count - 1) * gap > last_onset
    ):
        raise ValidationError(
            f"cannot place {count} arousals {params.min_onset_gap_s} s apart "
            f"in a {params.night_length_s} s night"
        )
    # stars and bars: pick sorted slots in the slack, then re-insert the gaps
    slack = last_onset - max(count - 1, 0) * gap
    slots = np.sort(rng.choice(slack + 1, size=count, replace=False)) if count else np.zeros(0, int)
    onsets = slots + np.arange(count) * gap
    sid = f"S{subject_index:03d}"
    events = tuple(
        EventAnnotation(sid, params.label, float(o) / f, EVENT_DURATION_S) for o in onsets
    )
    return SubjectRecord(sid, None, events, _fold(params, subject_index), n, f)


def generate_dataset(params: SynthParams) -> list[SubjectRecord]:
    return [generate_subject(params, i) for i in range(params.n_subjects)]


@dataclass(frozen=True)
class PredictorKind:
    """Naive baselines plus controlled detectors for sensitivity tests.

    ``jittered_oracle`` shifts each true target by a uniform integer jitter
    of at most ``jitter_s``, drops events with ``miss_rate`` and adds
    ``extra_rate`` spurious intervals per event. ``fixed_length`` marks
    ``length_s`` seconds centered on each onset. ``split_pair`` marks two
    ``length_s``-second blocks whose starts lie ``gap_s`` apart around each
    onset.
    """

    name: str
    jitter_s: float = 0.0
    miss_rate: float = 0.0
    extra_rate: float = 0.0
    length_s: float = 2.0
    gap_s: float = 8.0
    task: Task = "iod"
    l: float = 10.0  # noqa: E741

    NAMES = (
        "constant0",
        "constant1",
        "random_uniform",
        "random_stratified",
        "jittered_oracle",
        "fixed_length",
        "split_pair",
    )

    def __post_init__(self) -> None:
        if self.name not in self.NAMES:
            raise ValidationError(f"unknown predictor {self.name!r}; choose from {', '.join(self.NAMES)}")
        if not (0.0 <= self.miss_rate <= 1.0 and 0.0 <= self.extra_rate <= 1.0):
            raise ValidationError("miss_rate and extra_rate must lie in [0, 1]")
        if self.jitter_s < 0 or self.length_s <= 0 or self.gap_s < 0:
            raise ValidationError("jitter_s, gap_s must be >= 0 and length_s > 0")

    @classmethod
    def parse(cls, text: str) -> PredictorKind:
        """Parse ``name`` or ``name:key=value,key=value``.

        Keys: ``jitter``, ``miss``, ``extra``, ``length``, ``gap``, ``task``, ``l``.
        """
        name, _, rest = text.partition(":")
        aliases = {"jitter": "jitter_s", "miss": "miss_rate", "extra": "extra_rate", "length": "length_s", "gap": "gap_s"}
        kwargs: dict = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, sep, value = item.partition("=")
            key = aliases.get(key.strip(), key.strip())
            if not sep or key not in ("jitter_s", "miss_rate", "extra_rate", "length_s", "gap_s", "task", "l"):
                raise ValidationError(f"bad predictor option {item!r}")
            kwargs[key] = value.strip() if key == "task" else float(value)
        return cls(name.strip(), **kwargs)


def positive_window_prior(subject: SubjectRecord, s: float, task: Task = "pod", l: float = 10.0) -> float:  # noqa: E741
    """Fraction of ``s``-second windows holding a ground-truth target sample."""
    targets = build_targets(subject.events, task, subject.sampling_rate_hz, subject.n_samples, l=l)
    windows = window_labels_presence(rasterize(targets, subject.n_samples), s, subject.sampling_rate_hz)
    return float(windows.mean())


def _windowed(labels: np.ndarray, subject: SubjectRecord, s: float) -> ScoreSeries:
    return ScoreSeries(
        labels.astype(float), "windowed", subject.sampling_rate_hz, subject.n_samples, kind="binary", window_s=s
    )


def _pointwise(intervals: Sequence[Interval], subject: SubjectRecord) -> ScoreSeries:
    values = rasterize(intervals, subject.n_samples).astype(float)
    return ScoreSeries(values, "pointwise", subject.sampling_rate_hz, subject.n_samples)


def _clamped(start: int, end: int, n: int) -> Interval | None:
    start, end = max(0, start), min(n, end)
    return Interval(start, end) if end > start else None


def predict(kind: PredictorKind, subject: SubjectRecord, s: float = 30.0, seed: int = 0) -> ScoreSeries:
    """Prediction stream for ``subject``; deterministic per ``(seed, subject)``.

    Window predictors return binary window labels, the others pointwise
    scores of 1.0 inside predicted intervals and 0.0 elsewhere.
    """
    n, f = subject.n_samples, subject.sampling_rate_hz
    rng = rng_for(seed, _PREDICT_STREAM, zlib.crc32(subject.subject_id.encode()))
    count = n_windows(n, to_samples(s, f))

    if kind.name == "constant0":
        return _windowed(np.zeros(count), subject, s)
    if kind.name == "constant1":
        return _windowed(np.ones(count), subject, s)
    if kind.name == "random_uniform":
        return _windowed(rng.random(count) < 0.5, subject, s)
    if kind.name == "random_stratified":
        prior = positive_window_prior(subject, s)
        return _windowed(rng.random(count) < prior, subject, s)

    onsets = [to_samples(ev.onset_s, f) for ev in sorted(subject.events, key=lambda e: e.onset_s)]
    intervals: list[Interval] = []
    if kind.name == "jittered_oracle":
        targets = build_targets(subject.events, kind.task, f, n, l=kind.l)
        jitter = to_samples(kind.jitter_s, f)
        keep = rng.random(len(targets)) >= kind.miss_rate
        shifts = rng.integers(-jitter, jitter + 1, size=len(targets))
        for tgt, kept, shift in zip(targets, keep, shifts):
            if kept:
                # translate, never truncate, at the recording edges
                shift = min(max(int(shift), -tgt.start), n - tgt.end)
                intervals.append(Interval(tgt.start + shift, tgt.end + shift))
        extras = int(rng.binomial(len(targets), kind.extra_rate)) if targets else 0
        length = max(1, targets[0].length if targets else 1)
        for start in rng.integers(0, max(n - length, 0) + 1, size=extras):
            intervals.append(Interval(int(start), int(start) + length))
    elif kind.name == "fixed_length":
        length = to_samples(kind.length_s, f)
        for o in onsets:
            iv = _clamped(o - length // 2, o - length // 2 + length, n)
            if iv is not None:
                intervals.append(iv)
    else:  # split_pair
        length = max(1, to_samples(kind.length_s, f))
        half = to_samples(kind.gap_s, f) // 2
        first_offset = -half
        second_offset = to_samples(kind.gap_s, f) - half
        for o in onsets:
            for offset in (first_offset, second_offset):
                iv = _clamped(o + offset, o + offset + length, n)
                if iv is not None:
                    intervals.append(iv)
    return _pointwise(intervals, subject)


def synthesize(
    params: SynthParams, kind: PredictorKind, s: float = 30.0, predictor_seed: int | None = None
) -> list[SubjectRecord]:
    """Generate a dataset and attach predictions to every subject."""
    seed = params.seed if predictor_seed is None else predictor_seed
    return [sub.with_scores(predict(kind, sub, s, seed)) for sub in generate_dataset(params)]
