import numpy as np
import pytest

from nullattack.attack import AttackConfig
from nullattack.metrics import (DegenerateOracleError, RunOutcome, aggregate,
                                format_summary, nullifying_score)
from nullattack.suite import ExperimentSuite, oracle_from_spec, run_suite

SHIFT_SPEC = {"kind": "channel-shift", "height": 4, "width": 4, "channels": 3,
              "mask": "channel:0", "target": 0.9, "strength": 0.3, "seed": 0}


class TestNullifyingScore:
    def test_perfect_nullification(self):
        x0 = np.array([0.5, 0.5])
        y0 = np.array([0.8, 0.2])
        assert nullifying_score(x0, x0, y0) == 100.0

    def test_no_progress(self):
        x0 = np.array([0.5, 0.5])
        y0 = np.array([0.8, 0.2])
        assert nullifying_score(y0, x0, y0) == 0.0

    def test_threshold_anchor(self):
        # |output - x0|^2 = 0.25 |y0 - x0|^2 sits exactly at score 75
        x0 = np.zeros(2)
        y0 = np.array([1.0, 0.0])
        out = np.array([0.5, 0.0])
        assert nullifying_score(out, x0, y0) == 75.0

    def test_can_be_negative(self):
        x0 = np.zeros(2)
        y0 = np.array([0.1, 0.0])
        out = np.array([0.9, 0.0])
        assert nullifying_score(out, x0, y0) < 0.0

    def test_degenerate_denominator(self):
        x0 = np.array([0.5, 0.5])
        with pytest.raises(DegenerateOracleError):
            nullifying_score(x0, x0, x0)


def _outcome(variant, run_id, success, queries, budget=1000, score=80.0):
    return RunOutcome(variant, run_id, success, queries, budget, score)


def _rows_equal(a, b):
    if len(a) != len(b):
        return False
    for ra, rb in zip(a, b):
        for fa, fb in zip(ra.__dict__.values(), rb.__dict__.values()):
            same_nan = (isinstance(fa, float) and isinstance(fb, float)
                        and np.isnan(fa) and np.isnan(fb))
            if fa != fb and not same_nan:
                return False
    return True


class TestAggregate:
    def test_all_success(self):
        rows = aggregate([_outcome("RGF", f"r{i}", True, 100)
                          for i in range(10)])
        assert rows[0].asr == 100.0

    def test_all_failure_uses_budget(self):
        rows = aggregate([_outcome("RGF", f"r{i}", False, 1000, budget=1000)
                          for i in range(4)])
        assert rows[0].asr == 0.0
        assert rows[0].q_mean == 1000.0
        assert np.isnan(rows[0].q_success_mean)

    def test_mixed_arithmetic(self):
        outcomes = [_outcome("A", "r0", True, 100),
                    _outcome("A", "r1", True, 200),
                    _outcome("A", "r2", True, 300),
                    _outcome("A", "r3", False, 700, budget=1000)]
        row = aggregate(outcomes)[0]
        assert row.q_mean == pytest.approx(400.0)
        assert row.q_success_mean == pytest.approx(200.0)

    def test_rows_sorted_by_variant(self):
        rows = aggregate([_outcome("Z", "r0", True, 10),
                          _outcome("A", "r1", True, 10)])
        assert [r.variant for r in rows] == ["A", "Z"]

    def test_permutation_invariant(self):
        outcomes = [_outcome("A", f"r{i}", i % 2 == 0, 100 + i)
                    for i in range(6)]
        assert aggregate(outcomes) == aggregate(list(reversed(outcomes)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])


class TestFormatSummary:
    def test_has_header_and_rows(self):
        text = format_summary(aggregate([_outcome("RGF", "r0", True, 50)]))
        lines = text.splitlines()
        assert lines[0].startswith("variant")
        assert lines[1].startswith("RGF")


class TestSuite:
    def _suite(self, **kwargs):
        defaults = dict(
            oracle_spec=SHIFT_SPEC, n_inputs=1, variants=("LaS-GSA",),
            input_lo=0.35, input_hi=0.55, seed=0,
            base_config=AttackConfig(budget=3000),
        )
        defaults.update(kwargs)
        return ExperimentSuite(**defaults)

    def test_single_run_single_row(self, tmp_path):
        rows, records = run_suite(self._suite(), trace_dir=tmp_path)
        assert len(rows) == 1
        assert len(records) == 1
        assert len(list(tmp_path.glob("*.rows"))) == 1

    def test_deterministic_summaries(self):
        suite = self._suite(n_inputs=2, variants=("RGF", "LaS-GSA"))
        rows1, _ = run_suite(suite)
        rows2, _ = run_suite(suite)
        assert _rows_equal(rows1, rows2)

    def test_parallel_matches_serial(self, tmp_path):
        suite = self._suite(n_inputs=2, variants=("GSA", "LaS-GSA"))
        rows_serial, _ = run_suite(suite, parallel=1)
        rows_parallel, _ = run_suite(suite, parallel=4)
        assert _rows_equal(rows_serial, rows_parallel)

    def test_seeds_paired_across_variants(self):
        suite = self._suite()
        assert suite.attack_seed(3, 0) == suite.attack_seed(3, 0)
        assert suite.attack_seed(3, 0) != suite.attack_seed(4, 0)

    def test_inputs_respect_band(self):
        suite = self._suite()
        x0 = suite.input_vector(0, 48)
        assert np.all(x0 >= 0.35) and np.all(x0 <= 0.55)

    def test_transfer_variant_gets_surrogate(self):
        suite = self._suite(variants=("Prior-RGF",),
                            base_config=AttackConfig(budget=500))
        rows, records = run_suite(suite)
        assert records[0].outcome.error is None

    def test_validation(self):
        with pytest.raises(ValueError):
            self._suite(n_inputs=0).validate()
        with pytest.raises(ValueError):
            self._suite(input_lo=0.8, input_hi=0.2).validate()

    def test_oracle_from_spec_kinds(self):
        assert oracle_from_spec(SHIFT_SPEC).kind == "channel-shift"
        assert oracle_from_spec({"kind": "diag-smooth", "n": 8}).kind == \
            "diag-smooth"
        assert oracle_from_spec({"kind": "local-blur-residual", "height": 2,
                                 "width": 2, "channels": 1}).kind == \
            "local-blur-residual"
        with pytest.raises(ValueError):
            oracle_from_spec({"kind": "nope"})
