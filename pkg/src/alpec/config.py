"""Evaluation hyperparameters and the flat ``key=value`` config file format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from alpec.core import ValidationError

Task = Literal["fed", "iod", "pod"]
Scheme = Literal["alpec", "pe", "we"]
Alignment = Literal["centered", "leading"]

TASKS = ("fed", "iod", "pod")
SCHEMES = ("alpec", "pe", "we")
ALIGNMENTS = ("centered", "leading")

# t_k = k / 100 for k = 0..100; k / 100 is the correctly rounded double of "0.kk"
THRESHOLDS: tuple[float, ...] = tuple(k / 100 for k in range(101))

UNBOUNDED = math.inf


@dataclass(frozen=True)
class EvalConfig:
    """All post-processing and scheme hyperparameters, in seconds.

    Defaults are the standard clinical settings: d=60, delta=10,
    b_before=b_after=15, w=3, l=10, s=30. ``d=inf`` disables the maximum
    duration rule. ``f`` is normally taken from the data and only checked
    against it when set.
    """

    d: float = 60.0
    delta: float = 10.0
    b_before: float = 15.0
    b_after: float = 15.0
    w: float = 3.0
    l: float = 10.0  # noqa: E741
    s: float = 30.0
    f: float | None = None
    task: Task = "iod"
    scheme: Scheme = "alpec"
    iod_alignment: Alignment = "centered"

    def __post_init__(self) -> None:
        for name in ("d", "delta", "b_before", "b_after", "w", "l", "s"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValidationError(f"config {name} must be >= 0, got {value}")
        if self.d == 0:
            raise ValidationError("config d must be > 0 (use 'unbounded' to disable)")
        if self.s == 0:
            raise ValidationError("config s must be > 0")
        if self.f is not None and not self.f > 0:
            raise ValidationError(f"config f must be positive, got {self.f}")
        if self.task not in TASKS:
            raise ValidationError(f"unknown task {self.task!r}")
        if self.scheme not in SCHEMES:
            raise ValidationError(f"unknown scheme {self.scheme!r}")
        if self.iod_alignment not in ALIGNMENTS:
            raise ValidationError(f"unknown iod_alignment {self.iod_alignment!r}")

    @property
    def threshold_grid(self) -> tuple[float, ...]:
        return THRESHOLDS

    @property
    def merge_mode(self) -> str:
        return "endpoint_gap" if self.task == "fed" else "onset_maxima"

    def replace(self, **changes) -> EvalConfig:
        if "b" in changes:
            b = changes.pop("b")
            changes["b_before"] = changes["b_after"] = b
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["d"] = "unbounded" if math.isinf(self.d) else self.d
        return out

    @classmethod
    def from_dict(cls, data: dict) -> EvalConfig:
        data = dict(data)
        if data.get("d") in ("unbounded", "none", None):
            data["d"] = UNBOUNDED
        return cls(**data)


_FLOAT_KEYS = {"d", "delta", "b_before", "b_after", "w", "l", "s", "f"}
_STR_KEYS = {"task", "scheme", "iod_alignment"}


def parse_duration(text: str, key: str = "d") -> float:
    text = text.strip()
    if key == "d" and text.lower() in ("unbounded", "none", "inf"):
        return UNBOUNDED
    return float(text)


def parse_config(text: str, source: str = "<config>") -> EvalConfig:
    """Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped.

    ``b`` is shorthand for setting ``b_before`` and ``b_after`` together.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key == "b":
                values["b_before"] = values["b_after"] = float(value)
            elif key in _FLOAT_KEYS:
                values[key] = parse_duration(value, key)
            elif key in _STR_KEYS:
                values[key] = value
            else:
                raise ValidationError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValidationError(f"{source}:{lineno}: {exc}") from None
    try:
        return EvalConfig(**values)
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None


def load_config(path: str | Path | None) -> EvalConfig:
    if path is None:
        return EvalConfig()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, str(path))
