"""Exit criteria for the package, one test per criterion.

Each test carries an ``acceptance`` marker; the conftest hook prints one
PASS/FAIL line per criterion at the end of the run.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from alpec.config import THRESHOLDS, EvalConfig
from alpec.core import FOLDS
from alpec.fileio import load_dataset, read_report, write_dataset, write_report
from alpec.matching import MatchConfig, extend_ground_truth, match_and_count, reference_match_oracle
from alpec.metrics import ThresholdSweep, evaluate, select_threshold
from alpec.postproc import expand_window_labels, merge_intervals, threshold
from alpec.schemes import window_labels_presence
from alpec.synth import PredictorKind, SynthParams, arousals_for_window_prior, synthesize

from conftest import random_gt, random_intervals

NIGHT_S = 8 * 3600
PRIOR = 0.2


def _scores(report):
    return [(r.metrics.precision, r.metrics.recall, r.metrics.f2) for r in report.per_subject]


def _random_instance(rng):
    span = int(rng.integers(200, 3000))
    gt = random_gt(rng, 50, span)
    pred = random_intervals(rng, 50, span)
    d = float(rng.choice([rng.integers(1, 90), np.inf]))
    cfg = MatchConfig(
        f=1.0, n=span, b_before=float(rng.integers(0, 20)), b_after=float(rng.integers(0, 20)), d=d
    )
    return extend_ground_truth(gt, cfg), pred, cfg


@pytest.fixture(scope="module")
def prior_params():
    count = arousals_for_window_prior(PRIOR, NIGHT_S)
    return SynthParams(n_subjects=20, night_length_s=NIGHT_S, arousals_per_subject=count, seed=7)


@pytest.mark.acceptance("1 constant-1: WE recall 1, WE precision near prior, ALPEC all zero, < 10 s")
def test_constant_one_pathology(prior_params):
    start = time.perf_counter()
    data = synthesize(prior_params, PredictorKind("constant1"))
    base = EvalConfig(task="pod")
    we = evaluate(data, base.replace(scheme="we"), eval_folds=FOLDS)
    alpec = evaluate(data, base, eval_folds=FOLDS)
    elapsed = time.perf_counter() - start

    assert we.aggregate.recall == 1.0
    assert abs(we.aggregate.precision - PRIOR) <= 0.05
    assert (alpec.aggregate.precision, alpec.aggregate.recall, alpec.aggregate.f2) == (0.0, 0.0, 0.0)
    assert elapsed < 10


@pytest.mark.acceptance("2 constant-0: WE and ALPEC precision/recall/F2 all zero, < 5 s")
def test_constant_zero(prior_params):
    start = time.perf_counter()
    data = synthesize(prior_params, PredictorKind("constant0"))
    assert all(s.events for s in data)
    we = evaluate(data, EvalConfig(scheme="we"), eval_folds=FOLDS)
    alpec = evaluate(data, EvalConfig(), eval_folds=FOLDS)
    elapsed = time.perf_counter() - start

    for report in (we, alpec):
        agg = report.aggregate
        assert (agg.precision, agg.recall, agg.f2) == (0.0, 0.0, 0.0)
    assert elapsed < 5


@pytest.mark.acceptance("3 matcher equals the reference oracle on 1,000 instances, < 30 s")
def test_oracle_equivalence():
    rng = np.random.default_rng(1000)
    start = time.perf_counter()
    disagreements = 0
    for _ in range(1000):
        gt_ext, pred, cfg = _random_instance(rng)
        fast, slow = match_and_count(gt_ext, pred, cfg), reference_match_oracle(gt_ext, pred, cfg)
        disagreements += fast != slow
    assert disagreements == 0
    assert time.perf_counter() - start < 30


@pytest.mark.acceptance("4 conservation TP+FN=|gt|, FP=|pred|-TP on 10,000 instances")
def test_conservation():
    rng = np.random.default_rng(10_000)
    violations = 0
    for _ in range(10_000):
        gt_ext, pred, cfg = _random_instance(rng)
        r = match_and_count(gt_ext, pred, cfg)
        violations += r.tp + r.fn != len(gt_ext) or r.fp != len(pred) - r.tp
    assert violations == 0


@pytest.mark.acceptance("5 perfect detector scores exactly 1 for every subject, 100 seeds")
def test_perfect_detector_fixed_point():
    failures = []
    for seed in range(100):
        params = SynthParams(n_subjects=4, night_length_s=NIGHT_S, seed=seed)
        data = synthesize(params, PredictorKind("jittered_oracle"))
        report = evaluate(data, EvalConfig(), eval_folds=FOLDS)
        failures += [(seed, s) for s in _scores(report) if s != (1.0, 1.0, 1.0)]
    assert failures == []


@pytest.mark.acceptance("6 buffer sensitivity: F2(b=15) - F2(b=5) >= 0.05 at jitter 12 s")
def test_buffer_sensitivity():
    params = SynthParams(n_subjects=20, night_length_s=NIGHT_S, seed=3)
    data = synthesize(params, PredictorKind("jittered_oracle", jitter_s=12, task="pod"))
    base = EvalConfig(task="pod")
    f2 = {b: evaluate(data, base.replace(b=b)).aggregate.f2 for b in (5, 15)}
    assert f2[15] - f2[5] >= 0.05


@pytest.mark.acceptance("7 max duration: 30 s detections give recall 0 at d=10, 1 at d=60")
def test_max_duration_rule():
    params = SynthParams(n_subjects=6, night_length_s=NIGHT_S, arousals_per_subject=100, min_onset_gap_s=120, seed=5)
    data = synthesize(params, PredictorKind("fixed_length", length_s=30))
    assert evaluate(data, EvalConfig(d=10)).aggregate.recall == 0.0
    assert evaluate(data, EvalConfig(d=60)).aggregate.recall == 1.0


@pytest.mark.acceptance("8 merging: split pairs score higher at delta=10 than 5; idempotent on 10,000 lists")
def test_merging_rule():
    params = SynthParams(n_subjects=6, night_length_s=NIGHT_S, min_onset_gap_s=40, seed=9)
    data = synthesize(params, PredictorKind("split_pair", gap_s=8))
    f2 = {delta: evaluate(data, EvalConfig(delta=delta)).aggregate.f2 for delta in (5, 10)}
    assert f2[10] > f2[5]

    rng = np.random.default_rng(8)
    modes = ("endpoint_gap", "onset_maxima")
    for i in range(10_000):
        ivs = random_intervals(rng, 30, 2000)
        scores = rng.random(2000)
        delta = float(rng.integers(0, 40))
        once = merge_intervals(ivs, scores, delta, 1.0, modes[i % 2])
        assert merge_intervals(once, scores, delta, 1.0, modes[i % 2]) == once


@pytest.mark.acceptance("9 thresholding antitone on 1,000 series; ties pick smallest; exact grid")
def test_threshold_machinery():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        values = rng.random(int(rng.integers(1, 500)))
        t1, t2 = sorted(rng.choice(THRESHOLDS, size=2))
        assert np.all(threshold(values, t1) >= threshold(values, t2))

    ties = ThresholdSweep((0.2, 0.3, 0.4, 0.5), np.array([[0.1, 0.6, 0.6, 0.6], [0.3, 0.4, 0.4, 0.4]]), ("a", "b"))
    assert select_threshold(ties) == 0.3
    flat = ThresholdSweep(THRESHOLDS, np.zeros((2, 101)), ("a", "b"))
    assert select_threshold(flat) == 0.0

    assert len(THRESHOLDS) == 101
    assert THRESHOLDS == tuple(round(k * 0.01, 2) for k in range(101))


@pytest.mark.acceptance("10 round-trips: window labels, dataset files, JSON report")
def test_round_trips(tmp_path):
    rng = np.random.default_rng(10)
    for _ in range(1000):
        window = int(rng.integers(1, 40))
        labels = rng.integers(0, 2, size=int(rng.integers(1, 60)))
        n = labels.size * window - int(rng.integers(0, window))
        expanded = expand_window_labels(labels, window, 1.0, n)
        assert np.array_equal(window_labels_presence(expanded, window, 1.0), labels)

    params = SynthParams(n_subjects=4, night_length_s=3600, arousals_per_subject=(20, 40), seed=2)
    for kind in (PredictorKind("random_uniform"), PredictorKind("jittered_oracle", jitter_s=5, extra_rate=0.2)):
        data = synthesize(params, kind)
        out = tmp_path / kind.name
        assert load_dataset(write_dataset(data, out)) == data

    data = synthesize(params, PredictorKind("jittered_oracle", jitter_s=7, miss_rate=0.1))
    report = evaluate(data, EvalConfig(d=float("inf")))
    write_report(report, "json", tmp_path / "report.json")
    assert read_report(tmp_path / "report.json") == report


def _pipeline(tmp_path, threads):
    env = {**os.environ, "ALPEC_THREADS": str(threads)}
    run_dir = tmp_path / f"threads{threads}"
    cli = [sys.executable, "-m", "alpec"]
    synth = ["synth", "--subjects", "8", "--seed", "11", "--predictor", "jittered_oracle:jitter=9,miss=0.1,extra=0.1"]
    subprocess.run([*cli, *synth, "--out-dir", str(run_dir)], env=env, check=True, capture_output=True)
    out = {}
    for fmt in ("json", "csv"):
        path = run_dir / f"report.{fmt}"
        subprocess.run(
            [*cli, "evaluate", "--manifest", str(run_dir / "manifest.json"), "--format", fmt, "--out", str(path)],
            env=env,
            check=True,
            capture_output=True,
        )
        out[fmt] = path.read_bytes()
    return out


@pytest.mark.acceptance("11 determinism: 1 vs 8 threads give byte-identical reports")
def test_thread_determinism(tmp_path):
    assert _pipeline(tmp_path, 1) == _pipeline(tmp_path, 8)
