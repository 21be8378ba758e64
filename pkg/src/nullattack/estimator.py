"""Gradient estimation: antithetic RGF, limit-aware sampling, priors,
prior-quality estimation and the optimal prior-bias weight.

All estimators consume a black-box scalar loss callable. The callable is
responsible for charging the attack's query counter; the ``queries_spent``
fields record the exact number of loss/oracle evaluations each routine
performs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import (BoxLimit, as_vector, limit_ranges, sample_hyperellipsoid,
                   sample_unit_sphere, scale_vector)
from .diagnostics import finite_difference_gradient
from .oracle import QueryCounter, TranslationOracle

log = logging.getLogger(__name__)


@dataclass
class GradientEstimate:
    vector: np.ndarray
    queries_spent: int
    method: str


@dataclass
class PriorVector:
    v: np.ndarray
    source: str  # self-guiding | transfer | none
    queries_spent: int


@dataclass
class AlphaEstimate:
    alpha: float
    grad_norm: float
    queries_spent: int
    flat: bool = field(default=False)


def antithetic_estimate(loss, x, dirs: np.ndarray, delta: float) -> np.ndarray:
    """(1/q) sum_i [(L(x+d u_i) - L(x-d u_i)) / 2d] u_i for given directions."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    weights = np.empty(len(dirs))
    for i, u in enumerate(dirs):
        weights[i] = (loss(x + delta * u) - loss(x - delta * u)) / (2.0 * delta)
    return _kernels.weighted_mean(dirs, weights)


def rgf_estimate(loss, x, delta: float, q: int, rng) -> GradientEstimate:
    """Vanilla RGF over unit-sphere directions; spends exactly 2q queries."""
    x = as_vector(x)
    dirs = sample_unit_sphere(x.size, q, rng)
    g = antithetic_estimate(loss, x, dirs, delta)
    return GradientEstimate(g, 2 * q, "rgf")


def limit_aware_rgf(loss, x, limit: BoxLimit, delta: float, q: int,
                    mode: str = "min", rng=None) -> GradientEstimate:
    """RGF with directions from the hyperellipsoid inscribed in the limit.

    With mode="min" and delta <= 1 both antithetic probes stay feasible, and
    coordinates pinned at the boundary receive exactly zero estimate.
    """
    x = as_vector(x)
    omega_plus, omega_minus = limit_ranges(x, limit)
    b = scale_vector(omega_plus, omega_minus, mode)
    dirs = sample_hyperellipsoid(b, q, rng)
    g = antithetic_estimate(loss, x, dirs, delta)
    return GradientEstimate(g, 2 * q, "limit-aware-rgf")


def self_guiding_prior(oracle: TranslationOracle, x, reference, cached_output,
                       delta: float, counter: QueryCounter) -> PriorVector:
    """Jacobian-times-discrepancy approximation from one extra query.

    ``cached_output`` must be T(x) from the current iterate's loss
    evaluation; ``reference`` is the point the output should reach (x0 for
    the nullifying loss).
    """
    x = as_vector(x)
    a = as_vector(cached_output) - as_vector(reference)
    norm_a = float(np.linalg.norm(a))
    if norm_a < 1e-12:
        return PriorVector(np.zeros(x.size), "none", 0)
    probe = oracle.translate(x + delta * (a / norm_a), counter)
    v = norm_a * (probe - cached_output) / delta
    return PriorVector(v, "self-guiding", 1)


def transfer_prior(surrogate: TranslationOracle, x, reference,
                   h: float = 1e-4) -> PriorVector:
    """White-box gradient of the surrogate's nullifying loss.

    Surrogate evaluations are offline and free: they never touch attack
    counters, mirroring a pre-trained substitute model.
    """
    x = as_vector(x)
    reference = as_vector(reference)
    if reference.size != surrogate.n:
        raise ValueError("surrogate dimension mismatch")

    def sloss(z):
        d = surrogate.raw(z) - reference
        return float(d @ d)

    g = finite_difference_gradient(sloss, x, h)
    return PriorVector(g, "transfer", 0)


def estimate_alpha(loss, x, v_hat, delta: float, S: int, rng) -> AlphaEstimate:
    """Prior quality (cosine to the true gradient) and gradient norm.

    grad_norm^2 ~ N * mean over S sphere probes of squared forward-difference
    directional derivatives; alpha = directional derivative along v_hat over
    grad_norm, clamped into [-1, 1]. Spends S + 2 queries.
    """
    x = as_vector(x)
    v_hat = as_vector(v_hat)
    if abs(np.linalg.norm(v_hat) - 1.0) > 1e-9:
        raise ValueError("v_hat must be unit length")
    if S < 2:
        raise ValueError("S must be >= 2")
    base = loss(x)
    probes = sample_unit_sphere(x.size, S, rng)
    dsq = np.empty(S)
    for i, rho in enumerate(probes):
        dsq[i] = ((loss(x + delta * rho) - base) / delta) ** 2
    grad_norm = float(np.sqrt(x.size * dsq.mean()))
    spent = S + 2
    if grad_norm < 1e-12:
        log.debug("flat region: gradient norm below tolerance")
        # the directional query is still attempted for exact accounting
        loss(x + delta * v_hat)
        return AlphaEstimate(0.0, grad_norm, spent, flat=True)
    dv = (loss(x + delta * v_hat) - base) / delta
    alpha = float(np.clip(dv / grad_norm, -1.0, 1.0))
    return AlphaEstimate(alpha, grad_norm, spent)


def optimal_lambda(alpha: float, n: int, q: int) -> float:
    """Closed-form prior-bias weight minimizing expected estimation error."""
    if not -1.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [-1, 1]")
    if n < 2 or q < 1:
        raise ValueError("need n >= 2 and q >= 1")
    a2 = alpha * alpha
    denom_nq = n + 2 * q - 2
    if a2 <= 1.0 / denom_nq:
        return 0.0
    if a2 >= (2 * q - 1) / denom_nq:
        return 1.0
    numer = (1.0 - a2) * (a2 * denom_nq - 1.0)
    denom = 2.0 * a2 * n * q - a2 * a2 * n * denom_nq - 1.0
    if abs(denom) < 1e-15:
        fallback = 0.0 if a2 - 1.0 / denom_nq < (2 * q - 1) / denom_nq - a2 else 1.0
        log.warning("degenerate lambda denominator; falling back to %s", fallback)
        return fallback
    return float(np.clip(numer / denom, 0.0, 1.0))


def lambda_objective(lam, alpha: float, n: int, q: int):
    """Expected-error objective the closed form optimizes (for oracles).

    Returns the fraction of recovered gradient mass; the optimal lambda is
    its argmax over [0, 1].
    """
    lam = np.asarray(lam, dtype=np.float64)
    a2 = alpha * alpha
    mean = lam * a2 + (1.0 - lam) * (1.0 - a2) / (n - 1)
    num = mean ** 2
    den = (1.0 - 1.0 / q) * (lam ** 2 * a2 +
                             ((1.0 - lam) / (n - 1)) ** 2 * (1.0 - a2)) + mean / q
    return num / den


def prior_guided_samples(v_hat, lam: float, b, q: int, rng,
                         max_retries: int = 100) -> np.ndarray:
    """Query directions on a cone around the (projected) prior.

    u_i = sqrt(lam) v_hat + sqrt(1-lam) t_hat_i with t_i the component of a
    raw draw orthogonal to the prior direction. Raw draws come from the
    hyperellipsoid with scales ``b`` when given, else from the unit sphere.
    """
    v_hat = as_vector(v_hat)
    nv = float(np.linalg.norm(v_hat))
    if not 0.0 < nv <= 1.0 + 1e-12:
        raise ValueError("prior norm must lie in (0, 1]")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if lam >= 1.0:
        return np.tile(v_hat, (q, 1))
    vunit = v_hat / nv
    sq_l, sq_c = np.sqrt(lam), np.sqrt(1.0 - lam)
    out = np.empty((q, v_hat.size))
    for i in range(q):
        for attempt in range(max_retries + 1):
            if b is None:
                xi = sample_unit_sphere(v_hat.size, 1, rng)[0]
            else:
                xi = sample_hyperellipsoid(b, 1, rng)[0]
            t = xi - (vunit @ xi) * vunit
            nt = float(np.linalg.norm(t))
            if nt > 1e-12:
                break
        else:
            raise RuntimeError("could not draw a direction off the prior axis")
        out[i] = sq_l * v_hat + sq_c * (t / nt)
    return out
