"""Acceptance gate: one test per release criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -v`` via
the test outcome, and in captured output on failure). The expensive
end-to-end ablation suite is shared between the criteria that consume it.
"""

import time

import numpy as np
import pytest

import nullattack.attack as attack_mod
from nullattack.attack import AttackConfig, gradient_slide, run_attack, \
    write_trace
from nullattack.core import make_rng
from nullattack.metrics import nullifying_score
from nullattack.oracle import build_synthetic
from nullattack.probes import (prior_quality_probe,
                               probe_estimate_containment,
                               probe_estimator_consistency,
                               probe_jacobian_diagonality,
                               probe_lambda_closed_form,
                               probe_projection_detriment,
                               probe_projection_shrinks,
                               probe_slide_feasibility)
from nullattack.suite import ExperimentSuite, run_suite

ABLATION_SPEC = {"kind": "channel-shift", "height": 16, "width": 16,
                 "channels": 3, "mask": "channel:0", "target": 0.9,
                 "strength": 0.3, "seed": 0}


def _emit(idx, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {idx:2d}] {status}: {detail}")
    assert ok, f"criterion {idx} failed: {detail}"


@pytest.fixture(scope="module")
def ablation():
    """Criterion-6 suite: 20 paired-seed inputs, budget 50,000."""
    suite = ExperimentSuite(
        oracle_spec=ABLATION_SPEC, n_inputs=20,
        variants=("RGF", "S-RGF", "LaS-GSA"),
        input_lo=0.35, input_hi=0.55, seed=7,
        base_config=AttackConfig(budget=50_000),
    )
    t0 = time.time()
    rows, records = run_suite(suite, parallel=8)
    return rows, records, time.time() - t0


def test_criterion_01_projection_and_slide_probes():
    t0 = time.time()
    reports = [probe_projection_detriment(10_000),
               probe_projection_shrinks(10_000),
               probe_slide_feasibility(10_000),
               probe_estimate_containment(10_000)]
    elapsed = time.time() - t0
    violations = sum(r.violations for r in reports)
    ok = violations == 0 and elapsed <= 60.0
    _emit(1, ok, f"projection/slide/containment probes: {violations} violations over "
                 f"4x10^4 trials in {elapsed:.1f}s (limit 60s)")


def test_criterion_02_lambda_closed_form():
    report = probe_lambda_closed_form(200)
    _emit(2, report.passed,
          f"closed-form lambda vs 0.001-grid search: {report.detail}, "
          f"{report.violations}/200 beyond 0.002")


def test_criterion_03_estimator_consistency():
    report = probe_estimator_consistency(100)
    _emit(3, report.passed,
          f"mean cosine vs query count ({report.detail}); "
          "monotone within one standard error, q=256 >= 0.9")


def test_criterion_04_prior_quality():
    rep = prior_quality_probe(n_inputs=50, n=48, coupling=0.1,
                              surrogate_scale=0.3)
    ok = rep["self_beats_transfer_95"] and rep["self_beats_random_95"]
    _emit(4, ok,
          f"self prior cosine {rep['self'][0]:.3f} beats transfer "
          f"{rep['transfer'][0]:.3f} and random {rep['random'][0]:.3f} "
          "at 95% confidence over 50 paired inputs")


def test_criterion_05_score_anchors():
    x0 = np.array([0.0, 0.25])
    y0 = np.array([1.0, 0.25])
    at_100 = nullifying_score(x0, x0, y0)
    at_0 = nullifying_score(y0, x0, y0)
    at_75 = nullifying_score(np.array([0.5, 0.25]), x0, y0)
    ok = at_100 == 100.0 and at_0 == 0.0 and at_75 == 75.0
    _emit(5, ok, f"score anchors exact: {at_100}/{at_0}/{at_75}")


def test_criterion_06_directional_ablation(ablation):
    rows, _records, elapsed = ablation
    by = {r.variant: r for r in rows}
    ok = (by["LaS-GSA"].q_median < by["RGF"].q_median
          and by["LaS-GSA"].asr >= by["RGF"].asr
          and by["S-RGF"].asr >= by["RGF"].asr
          and elapsed <= 600.0)
    _emit(6, ok,
          f"Q_median LaS-GSA {by['LaS-GSA'].q_median:.0f} < "
          f"RGF {by['RGF'].q_median:.0f}; ASR LaS-GSA "
          f"{by['LaS-GSA'].asr:.0f} >= RGF {by['RGF'].asr:.0f}; "
          f"ASR S-RGF {by['S-RGF'].asr:.0f} >= RGF {by['RGF'].asr:.0f} "
          f"({elapsed:.0f}s, limit 600s)")


def test_criterion_07_feasibility_sweep(ablation):
    _rows, records, _elapsed = ablation
    worst = max(r.max_feasibility_violation for r in records)
    _emit(7, worst <= 1e-12,
          f"worst recorded iterate/slide violation {worst:.3g} over "
          f"{len(records)} runs (tolerance 1e-12)")


def test_criterion_08_slide_uses_no_queries(monkeypatch):
    oracle = build_synthetic("channel-shift",
                             {"shape": (16, 16, 3), "mask": "channel:0",
                              "target": 0.9, "strength": 0.3})
    raw_calls = {"n": 0}
    original_raw = oracle.raw

    def counting_raw(x):
        raw_calls["n"] += 1
        return original_raw(x)

    oracle.raw = counting_raw

    deltas = []

    def audited_slide(*args, **kwargs):
        before = raw_calls["n"]
        out = gradient_slide(*args, **kwargs)
        deltas.append(raw_calls["n"] - before)
        return out

    monkeypatch.setattr(attack_mod, "gradient_slide", audited_slide)
    x0 = make_rng(11).uniform(0.35, 0.55, oracle.n)
    run_attack(oracle, x0, AttackConfig(variant="LaS-GSA", budget=5000,
                                        seed=11))
    ok = len(deltas) >= 1 and all(d == 0 for d in deltas)
    _emit(8, ok, f"oracle-evaluation delta across {len(deltas)} slide "
                 f"invocations: {sorted(set(deltas))}")


def test_criterion_09_reproducibility(tmp_path):
    oracle = build_synthetic("channel-shift",
                             {"shape": (16, 16, 3), "mask": "channel:0",
                              "target": 0.9, "strength": 0.3})
    x0 = make_rng(12).uniform(0.35, 0.55, oracle.n)
    cfg = AttackConfig(variant="LaS-GSA", budget=20_000, seed=12)
    p1, p2 = tmp_path / "a.rows", tmp_path / "b.rows"
    write_trace(p1, run_attack(oracle, x0, cfg)[1])
    write_trace(p2, run_attack(oracle, x0, cfg)[1])
    ok = p1.read_bytes() == p2.read_bytes()
    _emit(9, ok, "repeated run with identical config+seed gives "
                 "byte-identical trace files")


def test_criterion_10_jacobian_diagonality():
    report = probe_jacobian_diagonality(5)
    _emit(10, report.passed,
          "diagonality >= 0.999 at coupling 0 and strictly decreasing "
          f"over couplings (0, 0.1, 0.5): {report.violations}/5 seeds "
          "violated")
