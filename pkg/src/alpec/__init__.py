"""Interval-level post-processing and event-count evaluation for event detection in long time series."""

from alpec.config import THRESHOLDS, EvalConfig, load_config, parse_config
from alpec.core import (
    EventAnnotation,
    Interval,
    MatchResult,
    ScoreSeries,
    SubjectRecord,
    ValidationError,
    extract_intervals,
    overlaps,
    rasterize,
    to_samples,
)
from alpec.matching import MatchConfig, extend_ground_truth, match_and_count, reference_match_oracle
from alpec.metrics import (
    MetricSet,
    Report,
    ThresholdSweep,
    compute_metrics,
    evaluate,
    evaluate_alpec,
    select_threshold,
    sweep_thresholds,
)
from alpec.postproc import expand_window_labels, merge_intervals, post_process, smooth_scores, threshold
from alpec.schemes import build_targets, evaluate_pointwise, evaluate_windowed, window_labels_presence

__all__ = [
    "THRESHOLDS",
    "EvalConfig",
    "load_config",
    "parse_config",
    "EventAnnotation",
    "Interval",
    "MatchResult",
    "ScoreSeries",
    "SubjectRecord",
    "ValidationError",
    "extract_intervals",
    "overlaps",
    "rasterize",
    "to_samples",
    "MatchConfig",
    "extend_ground_truth",
    "match_and_count",
    "reference_match_oracle",
    "MetricSet",
    "Report",
    "ThresholdSweep",
    "compute_metrics",
    "evaluate",
    "evaluate_alpec",
    "select_threshold",
    "sweep_thresholds",
    "expand_window_labels",
    "merge_intervals",
    "post_process",
    "smooth_scores",
    "threshold",
    "build_targets",
    "evaluate_pointwise",
    "evaluate_windowed",
    "window_labels_presence",
]

__version__ = "0.1.0"
