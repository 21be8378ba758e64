"""Empirical property probes standing in for the method's formal claims.

Each probe runs randomized instances from a documented distribution and
counts violations; a correct build produces zero. Probe randomness is
seeded, and violating instance seeds are reported for replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attack import gradient_slide
from .core import (BoxLimit, make_rng, project, sample_unit_sphere)
from .diagnostics import finite_difference_gradient, finite_difference_jacobian, \
    diagonality_metric
from .estimator import (antithetic_estimate, lambda_objective, limit_aware_rgf,
                        optimal_lambda, rgf_estimate, self_guiding_prior,
                        transfer_prior)
from .oracle import DiagSmoothTranslator, QueryCounter, make_surrogate


@dataclass
class ProbeReport:
    name: str
    passed: bool
    trials: int
    violations: int
    detail: str = ""
    failing_seeds: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"{status} {self.name}: {self.violations}/{self.trials} violations"
        if self.detail:
            msg += f" ({self.detail})"
        if self.failing_seeds:
            msg += f" seeds={self.failing_seeds[:10]}"
        return msg


def _free_counter() -> QueryCounter:
    return QueryCounter(10 ** 12)


def probe_projection_detriment(trials: int = 10_000, seed: int = 11) -> ProbeReport:
    """Clipping a gradient estimate never helps the descent objective:
    g . (clip(ghat) - ghat) <= 0.

    Instances use a concentrated estimator regime (q large, gradient
    components bounded away from zero) where per-coordinate sign agreement
    between the estimate and the true gradient holds with margin; the
    inequality is not a per-instance theorem for arbitrarily noisy
    estimates.
    """
    violations = 0
    seeds = []
    clipped = 0
    worst = -np.inf
    for t in range(trials):
        rng = make_rng(seed * 1_000_000 + t)
        n = int(rng.integers(8, 17))
        g = rng.uniform(0.5, 1.5, n) * rng.choice([-1.0, 1.0], n)
        dirs = sample_unit_sphere(n, 1024, rng)
        ghat = dirs.T @ (dirs @ g) / len(dirs)
        lo = -rng.uniform(0.0, 0.3, n)
        hi = rng.uniform(0.0, 0.3, n)
        proj = np.clip(ghat, lo, hi)
        if np.any(proj != ghat):
            clipped += 1
        val = float(g @ (proj - ghat))
        worst = max(worst, val)
        if val > 1e-9:
            violations += 1
            seeds.append(t)
    return ProbeReport("projection-detriment", violations == 0, trials,
                       violations, f"clipped in {clipped} trials, worst {worst:.3g}",
                       seeds)


def probe_projection_shrinks(trials: int = 10_000, seed: int = 13) -> ProbeReport:
    """Clipping never lengthens an estimate: |clip(ghat)|_2 <= |ghat|_2 + 1e-12."""
    violations = 0
    seeds = []
    for t in range(trials):
        rng = make_rng(seed * 1_000_000 + t)
        n = int(rng.integers(2, 65))
        ghat = rng.standard_normal(n) * rng.uniform(0.01, 10.0)
        lo = -rng.uniform(0.0, 1.0, n)
        hi = rng.uniform(0.0, 1.0, n)
        if np.linalg.norm(np.clip(ghat, lo, hi)) > np.linalg.norm(ghat) + 1e-12:
            violations += 1
            seeds.append(t)
    return ProbeReport("projection-shrinks", violations == 0, trials, violations,
                       failing_seeds=seeds)


def probe_slide_feasibility(trials: int = 10_000, seed: int = 17) -> ProbeReport:
    """Every sliding step stays inside the adversarial limit (tol 1e-12)."""
    violations = 0
    seeds = []
    for t in range(trials):
        rng = make_rng(seed * 1_000_000 + t)
        n = 2 if t % 2 == 0 else 48
        x0 = rng.uniform(0.0, 1.0, n)
        limit = BoxLimit.from_center(x0, float(rng.uniform(0.02, 0.3)))
        x = project(x0 + rng.uniform(-0.3, 0.3, n), limit)
        step = rng.standard_normal(n)
        step *= rng.uniform(0.05, 1.0) / np.linalg.norm(step)
        length = float(np.linalg.norm(step))
        s2 = project(x + step, limit)
        _, _, recovered, path = gradient_slide(x, s2, length, limit, 20)
        bad = any(limit.violation(p) > 1e-12 for p in path)
        if bad or recovered > length + 1e-9:
            violations += 1
            seeds.append(t)
    return ProbeReport("slide-feasibility", violations == 0, trials, violations,
                       failing_seeds=seeds)


def probe_estimate_containment(trials: int = 10_000, seed: int = 19) -> ProbeReport:
    """Raw limit-aware estimates are feasible steps (scale mode min).

    Holds for losses whose gradient magnitude times the ellipsoid scale is
    bounded by 1 (the weighted sum is then a sub-convex combination of
    in-limit directions).
    """
    violations = 0
    seeds = []
    for t in range(trials):
        rng = make_rng(seed * 1_000_000 + t)
        n = int(rng.integers(4, 33))
        x0 = rng.uniform(0.0, 1.0, n)
        limit = BoxLimit.from_center(x0, 0.1)
        x = project(x0 + rng.uniform(-0.05, 0.05, n), limit)
        c = rng.standard_normal(n)
        c /= max(np.linalg.norm(c), 1.0)
        est = limit_aware_rgf(lambda z: float(c @ z), x, limit, 1e-3, 16,
                              "min", rng)
        if limit.violation(x + est.vector) > 1e-12:
            violations += 1
            seeds.append(t)
    return ProbeReport("estimate-containment", violations == 0, trials,
                       violations, failing_seeds=seeds)


def probe_rgf_alignment(trials: int = 10_000, seed: int = 23) -> ProbeReport:
    """Vanilla RGF never points against the true gradient: g . ghat >= -1e-9."""
    violations = 0
    seeds = []
    for t in range(trials):
        rng = make_rng(seed * 1_000_000 + t)
        n = int(rng.integers(2, 33))
        c = rng.standard_normal(n)
        est = rgf_estimate(lambda z: float(c @ z), rng.uniform(0, 1, n),
                           1e-3, 8, rng)
        if float(c @ est.vector) < -1e-9:
            violations += 1
            seeds.append(t)
    return ProbeReport("rgf-alignment", violations == 0, trials, violations,
                       failing_seeds=seeds)


def probe_lambda_closed_form(trials: int = 200, seed: int = 29) -> ProbeReport:
    """Closed-form optimal lambda matches a 0.001-grid search within 0.002."""
    grid = np.linspace(0.0, 1.0, 1001)
    violations = 0
    seeds = []
    worst = 0.0
    for t in range(trials):
        rng = make_rng(seed * 1_000_000 + t)
        n = int(rng.integers(10, 501))
        q = int(rng.integers(1, 65))
        alpha = float(rng.uniform(0.0, 1.0))
        lam_grid = float(grid[np.argmax(lambda_objective(grid, alpha, n, q))])
        lam_cf = optimal_lambda(alpha, n, q)
        err = abs(lam_grid - lam_cf)
        worst = max(worst, err)
        if err > 0.002:
            violations += 1
            seeds.append(t)
    return ProbeReport("lambda-closed-form", violations == 0, trials, violations,
                       f"worst {worst:.5f}", seeds)


def probe_estimator_consistency(n_seeds: int = 100, seed: int = 31) -> ProbeReport:
    """Mean cosine to the true gradient grows with the query-pair count q."""
    n = 16
    qs = (4, 16, 64, 256)
    cosines = {q: [] for q in qs}
    for s in range(n_seeds):
        rng = make_rng(seed * 1_000_000 + s)
        c = rng.standard_normal(n)
        x = rng.uniform(0.0, 1.0, n)
        for q in qs:
            est = rgf_estimate(lambda z: float(c @ z), x, 1e-3, q, rng)
            cosines[q].append(
                float(c @ est.vector)
                / (np.linalg.norm(c) * np.linalg.norm(est.vector)))
    means = {q: float(np.mean(v)) for q, v in cosines.items()}
    ses = {q: float(np.std(v, ddof=1) / np.sqrt(n_seeds)) for q, v in cosines.items()}
    violations = 0
    for lo_q, hi_q in zip(qs, qs[1:]):
        if means[hi_q] < means[lo_q] - ses[lo_q]:
            violations += 1
    if means[256] < 0.9:
        violations += 1
    detail = ", ".join(f"q={q}: {means[q]:.3f}" for q in qs)
    return ProbeReport("estimator-consistency", violations == 0, len(qs),
                       violations, detail)


def prior_quality_probe(n_inputs: int = 50, n: int = 48, coupling: float = 0.1,
                        surrogate_scale: float = 0.3, seed: int = 37,
                        random_trials: int = 20) -> dict:
    """Mean cosine of each prior source to the finite-difference gradient.

    Returns per-source means and standard errors plus paired-difference
    statistics (self vs transfer, self vs random), over seeded inputs on a
    near-diagonal translator.
    """
    oracle = DiagSmoothTranslator(n, 0.6, coupling, seed)
    surrogate = make_surrogate(oracle, surrogate_scale, seed + 1)
    cos_self, cos_transfer, cos_random = [], [], []
    for i in range(n_inputs):
        rng = make_rng(seed * 1_000_000 + i)
        x0 = rng.uniform(0.2, 0.8, n)
        x = np.clip(x0 + rng.uniform(-0.05, 0.05, n), 0.0, 1.0)

        def loss(z):
            d = oracle.raw(z) - x0
            return float(d @ d)

        g = finite_difference_gradient(loss, x, 1e-5)
        gn = np.linalg.norm(g)
        out = oracle.raw(x)
        sp = self_guiding_prior(oracle, x, x0, out, 1e-4, _free_counter())
        tp = transfer_prior(surrogate, x, x0, 1e-5)
        cos_self.append(float(sp.v @ g) / (np.linalg.norm(sp.v) * gn))
        cos_transfer.append(float(tp.v @ g) / (np.linalg.norm(tp.v) * gn))
        rand_dirs = sample_unit_sphere(n, random_trials, rng)
        cos_random.extend((rand_dirs @ g) / gn)

    def stats(vals):
        vals = np.asarray(vals)
        return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(len(vals)))

    diff_st = np.asarray(cos_self) - np.asarray(cos_transfer)
    report = {
        "self": stats(cos_self),
        "transfer": stats(cos_transfer),
        "random": stats(cos_random),
        "self_minus_transfer": stats(diff_st),
        "inputs": n_inputs,
    }
    m, se = report["self_minus_transfer"]
    rm, rse = report["random"]
    sm, sse = report["self"]
    report["self_beats_transfer_95"] = m > 1.96 * se
    report["self_beats_random_95"] = sm - rm > 1.96 * np.hypot(sse, rse)
    return report


def probe_prior_quality(n_inputs: int = 50, seed: int = 37) -> ProbeReport:
    rep = prior_quality_probe(n_inputs=n_inputs, seed=seed)
    ok = rep["self_beats_transfer_95"] and rep["self_beats_random_95"]
    detail = (f"self {rep['self'][0]:.3f}, transfer {rep['transfer'][0]:.3f}, "
              f"random {rep['random'][0]:.3f}")
    return ProbeReport("prior-quality", ok, n_inputs, 0 if ok else 1, detail)


def probe_jacobian_diagonality(n_seeds: int = 5, n: int = 24,
                               seed: int = 41) -> ProbeReport:
    """Diagonality >= 0.999 at zero coupling and strictly decreasing in it."""
    violations = 0
    seeds = []
    for s in range(n_seeds):
        rng = make_rng(seed * 1_000_000 + s)
        x = rng.uniform(0.1, 0.9, n)
        metrics = []
        for coupling in (0.0, 0.1, 0.5):
            oracle = DiagSmoothTranslator(n, 0.6, coupling, seed + s)
            jac = finite_difference_jacobian(oracle, x, 1e-6)
            metrics.append(diagonality_metric(jac))
        if metrics[0] < 0.999 or not (metrics[0] > metrics[1] > metrics[2]):
            violations += 1
            seeds.append(s)
    return ProbeReport("jacobian-diagonality", violations == 0, n_seeds,
                       violations, failing_seeds=seeds)


def run_verification(level: str = "fast", seed: int = 7) -> list[ProbeReport]:
    """The proof-replacement suite; ``full`` uses acceptance-grade counts."""
    if level == "fast":
        t, cons, inputs, diag = 500, 20, 12, 2
    elif level == "full":
        t, cons, inputs, diag = 10_000, 100, 50, 5
    else:
        raise ValueError(f"unknown level {level!r}")
    return [
        probe_projection_detriment(t, seed + 11),
        probe_projection_shrinks(t, seed + 13),
        probe_slide_feasibility(t, seed + 17),
        probe_estimate_containment(t, seed + 19),
        probe_rgf_alignment(t, seed + 23),
        probe_lambda_closed_form(200, seed + 29),
        probe_estimator_consistency(cons, seed + 31),
        probe_prior_quality(inputs, seed + 37),
        probe_jacobian_diagonality(diag, seed=seed + 41),
    ]
