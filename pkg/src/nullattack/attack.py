"""The optimization loop: losses, PGD stepping, gradient sliding, variant
wiring and the end-to-end attack run with trace persistence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .core import (BoxLimit, as_vector, clip_offset, limit_ranges, make_rng,
                   project, scale_vector)
from .estimator import (antithetic_estimate, estimate_alpha, optimal_lambda,
                        prior_guided_samples, self_guiding_prior, transfer_prior)
from .core import (FrozenIterateError, sample_hyperellipsoid,
                   sample_unit_sphere)
from .oracle import BudgetExhaustedError, QueryCounter, TranslationOracle

VARIANT_NAMES = ("RGF", "GSA", "S-RGF", "S-GSA", "LaS-RGF", "LaS-GSA", "Prior-RGF")


class ConfigError(ValueError):
    pass


class VanishingGradientError(RuntimeError):
    pass


@dataclass(frozen=True)
class VariantWiring:
    ellipsoid: bool
    prior: str | None  # "self", "transfer" or None
    slide: bool


_WIRING = {
    "RGF": VariantWiring(False, None, False),
    "GSA": VariantWiring(False, None, True),
    "S-RGF": VariantWiring(False, "self", False),
    "S-GSA": VariantWiring(False, "self", True),
    "LaS-RGF": VariantWiring(True, "self", False),
    "LaS-GSA": VariantWiring(True, "self", True),
    "Prior-RGF": VariantWiring(False, "transfer", False),
}


def variant_wiring(variant: str) -> VariantWiring:
    try:
        return _WIRING[variant]
    except KeyError:
        raise ConfigError(f"unknown variant {variant!r}") from None


@dataclass
class AttackConfig:
    delta: float = 0.001
    epsilon: float = 0.1
    eta: float = 1.0
    q: int = 8
    S: int = 10
    R: int = 10
    budget: int = 100_000
    threshold: float = 75.0
    variant: str = "LaS-GSA"
    loss_kind: str = "nullify"
    scale_mode: str = "min"
    max_slide_steps: int = 20
    seed: int = 0
    fd_h: float = 1e-4
    surrogate_scale: float = 0.1

    def validate(self) -> "AttackConfig":
        if self.delta <= 0 or self.epsilon <= 0 or self.eta <= 0:
            raise ConfigError("delta, epsilon and eta must be positive")
        if not 0 < self.threshold <= 100:
            raise ConfigError("threshold must lie in (0, 100]")
        if self.q < 1 or self.S < 2 or self.R < 1 or self.max_slide_steps < 1:
            raise ConfigError("counts must be positive (S >= 2)")
        if self.budget < 1:
            raise ConfigError("budget must be positive")
        variant_wiring(self.variant)
        if self.loss_kind not in ("nullify", "distort"):
            raise ConfigError(f"unknown loss kind {self.loss_kind!r}")
        if self.scale_mode not in ("min", "mean"):
            raise ConfigError(f"unknown scale mode {self.scale_mode!r}")
        return self

    def override(self, **kwargs) -> "AttackConfig":
        return replace(self, **kwargs).validate()


@dataclass
class StepRecord:
    iteration: int
    queries_total: int
    loss_value: float
    score: float
    alpha: float
    lam: float
    slide_steps: int
    slide_recovered: float


@dataclass
class AttackResult:
    success: bool
    final_score: float
    queries: int
    iterations: int
    max_feasibility_violation: float
    stalled: bool = field(default=False)
    final_x: np.ndarray | None = field(default=None, repr=False)


def nullifying_loss(oracle: TranslationOracle, x, x0, counter: QueryCounter):
    """Squared distance of the translated output back to the original input."""
    out = oracle.translate(x, counter)
    d = out - as_vector(x0)
    return float(d @ d), out


def distorting_loss(oracle: TranslationOracle, x, y0, counter: QueryCounter):
    """Negated squared distance to the legitimate translation (minimized)."""
    out = oracle.translate(x, counter)
    d = out - as_vector(y0)
    return -float(d @ d), out


def pgd_step(x, estimate_vector, eta: float, limit: BoxLimit) -> np.ndarray:
    """Projected descent step along the normalized estimated gradient."""
    g = as_vector(estimate_vector)
    norm = float(np.linalg.norm(g))
    if norm <= 1e-12:
        raise VanishingGradientError("vanishing gradient estimate")
    return project(as_vector(x) - eta * g / norm, limit)


def gradient_slide(start, projected, length: float, limit: BoxLimit,
                   max_steps: int):
    """Expand a projection-truncated step into boundary-tangent segments.

    Uses no oracle queries. Returns (final, steps, recovered, path); the
    path contains every intermediate point for feasibility auditing.
    """
    start = as_vector(start)
    projected = as_vector(projected)
    return _kernels.slide(start, projected, float(length), limit.lo, limit.hi,
                          int(max_steps))


def run_attack(oracle: TranslationOracle, x0, config: AttackConfig,
               surrogate: TranslationOracle | None = None):
    """Run one attack; returns (AttackResult, list of StepRecord).

    Deterministic given (oracle, x0, config). All oracle evaluations inside
    the run are charged to a single counter; surrogate evaluations are free.
    """
    config.validate()
    x0 = as_vector(x0)
    if np.any(x0 < 0) or np.any(x0 > 1):
        raise ConfigError("x0 must lie in [0,1]^N")
    if x0.size != oracle.n:
        raise ConfigError("input dimension does not match oracle")
    wiring = variant_wiring(config.variant)
    if wiring.prior == "transfer" and surrogate is None:
        raise ConfigError("transfer-prior variant requires a surrogate model")

    n = x0.size
    limit = BoxLimit.from_center(x0, config.epsilon)
    counter = QueryCounter(config.budget)
    rng = make_rng(config.seed)

    trace: list[StepRecord] = []
    best = -math.inf
    success = False
    stalled = False
    max_viol = 0.0
    iteration = 0
    x = x0.copy()
    best_x = x0.copy()

    alpha = 0.0
    lam = 0.0
    prior_sign = 1.0
    have_alpha = False

    try:
        y0 = oracle.translate(x0, counter)
        denom = float((y0 - x0) @ (y0 - x0))
        if denom < 1e-24:
            # threat model already leaves this input unchanged
            trace.append(StepRecord(0, counter.total, 0.0, 100.0, 0.0, 0.0, 0, 0.0))
            return AttackResult(True, 100.0, counter.total, 0, 0.0,
                                final_x=x0.copy()), trace

        reference = x0 if config.loss_kind == "nullify" else y0

        def loss_of(z):
            if config.loss_kind == "nullify":
                return nullifying_loss(oracle, z, x0, counter)
            return distorting_loss(oracle, z, y0, counter)

        def loss_scalar(z):
            return loss_of(z)[0]

        while True:
            loss_val, out = loss_of(x)
            dnull = out - x0
            score = (1.0 - float(dnull @ dnull) / denom) * 100.0
            if score > best:
                best = score
                best_x = x.copy()
            max_viol = max(max_viol, limit.violation(x))

            record = StepRecord(iteration, counter.total, loss_val, score,
                                alpha, lam, 0, 0.0)
            trace.append(record)

            if score > config.threshold:
                success = True
                break

            # prior extraction
            v_hat = None
            if wiring.prior == "self":
                prior = self_guiding_prior(oracle, x, reference, out,
                                           config.delta, counter)
            elif wiring.prior == "transfer":
                prior = transfer_prior(surrogate, x, reference, config.fd_h)
            else:
                prior = None
            if prior is not None and prior.source != "none":
                vnorm = float(np.linalg.norm(prior.v))
                if vnorm > 1e-12:
                    omega_plus, omega_minus = limit_ranges(x, limit)
                    vproj = clip_offset(prior.v / vnorm, omega_minus, omega_plus)
                    if float(np.linalg.norm(vproj)) > 1e-12:
                        v_hat = vproj

            if v_hat is not None:
                if not have_alpha or iteration % config.R == 0:
                    unit = v_hat / np.linalg.norm(v_hat)
                    est = estimate_alpha(loss_scalar, x, unit, config.delta,
                                         config.S, rng)
                    have_alpha = True
                    prior_sign = -1.0 if est.alpha < 0 else 1.0
                    alpha = abs(est.alpha)
                    lam = 0.0 if est.flat else optimal_lambda(alpha, n, config.q)
                v_hat = prior_sign * v_hat
                record.alpha = alpha
                record.lam = lam

            # query directions and gradient estimate (stall policy: 3 retries)
            b = None
            if wiring.ellipsoid:
                omega_plus, omega_minus = limit_ranges(x, limit)
                b = scale_vector(omega_plus, omega_minus, config.scale_mode)

            ghat = None
            for _ in range(4):
                try:
                    if v_hat is not None:
                        dirs = prior_guided_samples(v_hat, lam, b, config.q,
                                                    rng)
                    elif wiring.ellipsoid:
                        dirs = sample_hyperellipsoid(b, config.q, rng)
                    else:
                        dirs = sample_unit_sphere(n, config.q, rng)
                except FrozenIterateError:
                    # every coordinate pinned at the boundary: no feasible
                    # query direction exists for this iterate
                    break
                cand = antithetic_estimate(loss_scalar, x, dirs, config.delta)
                if float(np.linalg.norm(cand)) > 1e-12:
                    ghat = cand
                    break
            if ghat is None:
                stalled = True
                break

            x_new = pgd_step(x, ghat, config.eta, limit)
            if wiring.slide:
                x_new, steps, recovered, path = gradient_slide(
                    x, x_new, config.eta, limit, config.max_slide_steps)
                for p in path:
                    max_viol = max(max_viol, limit.violation(p))
                record.slide_steps = steps
                record.slide_recovered = recovered
            else:
                max_viol = max(max_viol, limit.violation(x_new))

            record.queries_total = counter.total
            x = x_new
            iteration += 1
    except BudgetExhaustedError:
        pass

    result = AttackResult(success, best, counter.total, iteration, max_viol,
                          stalled, final_x=best_x)
    return result, trace


TRACE_HEADER = ("iteration", "queries", "loss", "score", "alpha", "lambda",
                "slide_steps", "slide_recovered")


def write_trace(path, records: list[StepRecord]) -> None:
    lines = ["#" + "\t".join(TRACE_HEADER)]
    for r in records:
        lines.append("\t".join([
            str(r.iteration), str(r.queries_total),
            format(r.loss_value, ".17g"), format(r.score, ".17g"),
            format(r.alpha, ".17g"), format(r.lam, ".17g"),
            str(r.slide_steps), format(r.slide_recovered, ".17g"),
        ]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path) -> list[StepRecord]:
    records = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        f = line.split("\t")
        records.append(StepRecord(int(f[0]), int(f[1]), float(f[2]), float(f[3]),
                                  float(f[4]), float(f[5]), int(f[6]), float(f[7])))
    return records
