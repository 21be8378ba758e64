"""Experiment suites: batches of (input x variant x replication) attack runs
with deterministic pairing of seeds across variants."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attack import (AttackConfig, VARIANT_NAMES, run_attack, variant_wiring,
                     write_trace)
from .core import make_rng
from .metrics import RunOutcome, SummaryRow, aggregate
from .oracle import (TranslationOracle, build_synthetic, make_surrogate)


def oracle_from_spec(spec: dict) -> TranslationOracle:
    """Build a translator from a typed spec dict (as parsed from config)."""
    kind = spec["kind"]
    seed = int(spec.get("seed", 0))
    if kind == "channel-shift":
        shape = (spec["height"], spec["width"], spec["channels"])
        params = {"shape": shape, "mask": spec.get("mask", "all"),
                  "target": spec.get("target", 0.9),
                  "strength": spec.get("strength", 0.3)}
    elif kind == "diag-smooth":
        params = {"n": spec["n"], "gamma": spec.get("gamma", 0.6),
                  "coupling": spec.get("coupling", 0.1)}
    elif kind == "local-blur-residual":
        shape = (spec["height"], spec["width"], spec["channels"])
        params = {"shape": shape, "beta": spec.get("beta", 0.4)}
    else:
        raise ValueError(f"unknown translator kind {kind!r}")
    return build_synthetic(kind, params, seed)


@dataclass
class ExperimentSuite:
    oracle_spec: dict
    n_inputs: int
    variants: tuple = VARIANT_NAMES
    replications: int = 1
    input_lo: float = 0.2
    input_hi: float = 0.6
    seed: int = 0
    base_config: AttackConfig = field(default_factory=AttackConfig)

    def validate(self) -> "ExperimentSuite":
        if self.n_inputs < 1 or self.replications < 1:
            raise ValueError("need at least one input and one replication")
        if not 0.0 <= self.input_lo <= self.input_hi <= 1.0:
            raise ValueError("input range must satisfy 0 <= lo <= hi <= 1")
        for v in self.variants:
            variant_wiring(v)
        self.base_config.validate()
        return self

    def input_vector(self, index: int, n: int) -> np.ndarray:
        rng = make_rng(self.seed * 1_000_003 + index)
        return rng.uniform(self.input_lo, self.input_hi, n)

    def attack_seed(self, index: int, rep: int) -> int:
        # shared across variants so comparisons are seed-paired
        return self.seed * 7_919 + index * 101 + rep


@dataclass
class SuiteRunRecord:
    outcome: RunOutcome
    iterations: int = 0
    max_feasibility_violation: float = 0.0
    stalled: bool = False


def _run_one(args) -> SuiteRunRecord:
    oracle_spec, x0, config, run_id, trace_path, surrogate_seed = args
    oracle = oracle_from_spec(oracle_spec)
    surrogate = None
    if variant_wiring(config.variant).prior == "transfer":
        surrogate = make_surrogate(oracle, config.surrogate_scale, surrogate_seed)
    try:
        result, trace = run_attack(oracle, x0, config, surrogate=surrogate)
    except Exception as exc:  # a failed run must not sink the suite
        outcome = RunOutcome(config.variant, run_id, False, config.budget,
                             config.budget, float("nan"), error=repr(exc))
        return SuiteRunRecord(outcome)
    if trace_path is not None:
        write_trace(trace_path, trace)
    outcome = RunOutcome(config.variant, run_id, result.success, result.queries,
                         config.budget, result.final_score)
    return SuiteRunRecord(outcome, result.iterations,
                          result.max_feasibility_violation, result.stalled)


def run_suite(suite: ExperimentSuite, parallel: int = 1, trace_dir=None):
    """Execute all runs; returns (summary rows, list of SuiteRunRecord).

    Results are merged by run identifier, never by completion order, so the
    output is deterministic regardless of the parallelism degree.
    """
    suite.validate()
    oracle = oracle_from_spec(suite.oracle_spec)
    n = oracle.n
    if trace_dir is not None:
        Path(trace_dir).mkdir(parents=True, exist_ok=True)
    surrogate_seed = suite.seed + 997

    jobs = []
    for i in range(suite.n_inputs):
        x0 = suite.input_vector(i, n)
        for variant in suite.variants:
            for rep in range(suite.replications):
                run_id = f"{variant}_in{i:03d}_rep{rep:02d}"
                config = suite.base_config.override(
                    variant=variant, seed=suite.attack_seed(i, rep))
                trace_path = (None if trace_dir is None
                              else str(Path(trace_dir) / f"{run_id}.rows"))
                jobs.append((suite.oracle_spec, x0, config, run_id, trace_path,
                             surrogate_seed))

    if parallel > 1:
        workers = min(parallel, os.cpu_count() or 1, len(jobs))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(job) for job in jobs]

    records.sort(key=lambda r: r.outcome.run_id)
    rows = aggregate([r.outcome for r in records])
    return rows, records
