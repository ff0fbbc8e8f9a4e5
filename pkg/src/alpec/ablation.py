"""One-parameter-at-a-time sweeps over the evaluation hyperparameters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from alpec.config import EvalConfig
from alpec.core import SubjectRecord, ValidationError
from alpec.metrics import evaluate

ABLATION_PARAMS = ("w", "l", "d", "delta", "b")


@dataclass(frozen=True)
class AblationRow:
    value: float
    precision: float
    recall: float
    f2: float
    t_opt: float | None


def run_ablation(
    dataset: Sequence[SubjectRecord],
    base_config: EvalConfig,
    parameter: str,
    values: Sequence[float],
) -> list[AblationRow]:
    """Re-run the evaluation for each value of ``parameter``, all else fixed.

    ``b`` sets both buffers at once.
    """
    if parameter not in ABLATION_PARAMS:
        raise ValidationError(f"unknown ablation parameter {parameter!r}; choose from {', '.join(ABLATION_PARAMS)}")
    if not values:
        raise ValidationError("ablation needs at least one value")
    rows = []
    for value in values:
        report = evaluate(dataset, base_config.replace(**{parameter: value}))
        agg = report.aggregate
        rows.append(AblationRow(value, agg.precision, agg.recall, agg.f2, report.t_opt))
    return rows
