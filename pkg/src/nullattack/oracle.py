"""Black-box translation oracles.

A translation oracle is a deterministic map from [0,1]^N to [0,1]^N.
Attack code must go through :meth:`TranslationOracle.translate`, which
charges a query counter; test oracles (finite differences, surrogates) call
:meth:`raw` and therefore live in a separate accounting namespace.

The synthetic family spans diagonal (channel-shift), near-diagonal
(diag-smooth) and banded (local-blur-residual) Jacobians. Every kind is
built from smooth primitives so finite-difference oracles stay accurate,
and maps [0,1]^N into [0,1]^N by construction (convex combinations); the
soft clip only engages for out-of-range inputs such as probe overshoots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_vector, check_finite

SQUASH_STEEPNESS = 8.0


class BudgetExhaustedError(RuntimeError):
    def __init__(self, total: int, budget: int):
        super().__init__(f"budget exhausted ({total}/{budget} queries)")
        self.total = total
        self.budget = budget


@dataclass
class QueryCounter:
    """Monotone count of oracle evaluations against a fixed budget."""

    budget: int
    total: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be positive")

    def charge(self, n: int = 1) -> None:
        if self.total + n > self.budget:
            raise BudgetExhaustedError(self.total, self.budget)
        self.total += n

    @property
    def remaining(self) -> int:
        return self.budget - self.total


def smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def soft_clip(t, k: float = SQUASH_STEEPNESS):
    """Smooth range guard: identity on [0,1], saturating outside.

    Bounded within [-1/k, 1 + 1/k] and C1 everywhere, so derivatives stay
    meaningful where a hard clip would zero them out.
    """
    t = np.asarray(t, dtype=np.float64)
    below = np.minimum(t, 0.0)
    above = np.maximum(t - 1.0, 0.0)
    out = np.where(t < 0.0, (np.exp(k * below) - 1.0) / k, t)
    return np.where(t > 1.0, 1.0 + (1.0 - np.exp(-k * above)) / k, out)


class TranslationOracle:
    """Deterministic immutable translator; ``n`` is the flat dimension."""

    n: int
    shape: tuple | None = None
    kind: str = "abstract"

    def raw(self, x: np.ndarray) -> np.ndarray:
        """Uncounted evaluation (test/surrogate namespace only)."""
        raise NotImplementedError

    def translate(self, x, counter: QueryCounter) -> np.ndarray:
        x = check_finite(as_vector(x), "oracle input")
        if x.size != self.n:
            raise ValueError(f"dimension mismatch: got {x.size}, oracle has {self.n}")
        counter.charge(1)
        return self.raw(x)


class ChannelShiftTranslator(TranslationOracle):
    """Smoothstep pull of masked coordinates toward a target value.

    out_i = x_i + mask_i * strength * smoothstep(|target - x_i|) * (target - x_i)

    The Jacobian is exactly diagonal.
    """

    kind = "channel-shift"

    def __init__(self, shape, mask, target: float, strength: float):
        self.shape = tuple(shape)
        self.n = int(np.prod(self.shape))
        mask = as_vector(mask)
        if mask.size != self.n:
            raise ValueError("mask length mismatch")
        if not 0.0 <= target <= 1.0:
            raise ValueError("target must lie in [0,1]")
        if not 0.0 <= strength <= 1.0:
            raise ValueError("strength must lie in [0,1]")
        self.mask = (mask != 0).astype(np.float64)
        self.target = float(target)
        self.strength = float(strength)

    def raw(self, x):
        d = self.target - x
        w = self.strength * smoothstep(np.abs(d))
        return soft_clip(x + self.mask * w * d)


class DiagSmoothTranslator(TranslationOracle):
    """Coordinatewise smooth nonlinearity blended with linear mixing.

    out = ((1-coupling) I + coupling M) phi(x), with M a seeded
    row-stochastic matrix, so the Jacobian is exactly diagonal at
    coupling 0 and loses diagonal mass as coupling grows.
    """

    kind = "diag-smooth"
    MAX_DIM = 4096

    def __init__(self, n: int, gamma: float, coupling: float, seed: int):
        if n < 1 or n > self.MAX_DIM:
            raise ValueError(f"diag-smooth supports 1 <= n <= {self.MAX_DIM}")
        if not 0.0 <= gamma < 1.0:
            raise ValueError("gamma must lie in [0,1)")
        if not 0.0 <= coupling <= 1.0:
            raise ValueError("coupling must lie in [0,1]")
        self.n = int(n)
        self.gamma = float(gamma)
        self.coupling = float(coupling)
        self.seed = int(seed)
        mix = np.random.Generator(np.random.PCG64(seed)).uniform(0.0, 1.0, (n, n))
        self.mixing = mix / mix.sum(axis=1, keepdims=True)

    def _phi(self, x):
        return (1.0 - self.gamma) * x + self.gamma * smoothstep(x)

    def raw(self, x):
        p = self._phi(x)
        return soft_clip((1.0 - self.coupling) * p + self.coupling * (self.mixing @ p))


class LocalBlurResidualTranslator(TranslationOracle):
    """Identity blended with a separable 3-tap spatial blur.

    out = (1-beta) x + beta blur(x); the Jacobian is banded with
    bandwidth 1 along each spatial axis.
    """

    kind = "local-blur-residual"

    def __init__(self, shape, beta: float):
        if len(shape) != 3:
            raise ValueError("shape must be (height, width, channels)")
        if not 0.0 <= beta <= 1.0:
            raise ValueError("beta must lie in [0,1]")
        self.shape = tuple(int(s) for s in shape)
        self.n = int(np.prod(self.shape))
        self.beta = float(beta)

    @staticmethod
    def _blur_axis(img, axis):
        padded = np.pad(img, [(1, 1) if a == axis else (0, 0) for a in range(img.ndim)],
                        mode="edge")
        lo = np.take(padded, range(0, img.shape[axis]), axis=axis)
        mid = np.take(padded, range(1, img.shape[axis] + 1), axis=axis)
        hi = np.take(padded, range(2, img.shape[axis] + 2), axis=axis)
        return 0.25 * lo + 0.5 * mid + 0.25 * hi

    def raw(self, x):
        img = x.reshape(self.shape)
        blurred = self._blur_axis(self._blur_axis(img, 0), 1)
        out = (1.0 - self.beta) * img + self.beta * blurred
        return soft_clip(out.ravel())


def make_mask(shape, spec: str) -> np.ndarray:
    """Mask specs: ``all``, ``none`` or ``channel:<index>`` (channel-last)."""
    n = int(np.prod(shape))
    if spec == "all":
        return np.ones(n)
    if spec == "none":
        return np.zeros(n)
    if spec.startswith("channel:"):
        if len(shape) != 3:
            raise ValueError("channel mask needs an image shape")
        idx = int(spec.split(":", 1)[1])
        if not 0 <= idx < shape[2]:
            raise ValueError(f"channel index {idx} out of range")
        mask = np.zeros(shape)
        mask[:, :, idx] = 1.0
        return mask.ravel()
    raise ValueError(f"unknown mask spec {spec!r}")


def build_synthetic(kind: str, params: dict, seed: int = 0) -> TranslationOracle:
    """Deterministic constructor for the synthetic translator family."""
    if kind == "channel-shift":
        shape = params["shape"]
        mask = params.get("mask")
        if mask is None or isinstance(mask, str):
            mask = make_mask(shape, mask or "all")
        return ChannelShiftTranslator(shape, mask, params.get("target", 0.9),
                                      params.get("strength", 0.3))
    if kind == "diag-smooth":
        return DiagSmoothTranslator(params["n"], params.get("gamma", 0.6),
                                    params.get("coupling", 0.1), seed)
    if kind == "local-blur-residual":
        return LocalBlurResidualTranslator(params["shape"], params.get("beta", 0.4))
    raise ValueError(f"unknown translator kind {kind!r}")


def make_surrogate(base: TranslationOracle, scale: float, seed: int) -> TranslationOracle:
    """Same-architecture translator with multiplicatively jittered parameters."""
    if scale < 0:
        raise ValueError("perturbation scale must be nonnegative")
    rng = np.random.Generator(np.random.PCG64(seed))

    def jit(value, lo=None, hi=None):
        v = value * (1.0 + scale * rng.standard_normal())
        if lo is not None:
            v = max(lo, v)
        if hi is not None:
            v = min(hi, v)
        return v

    if isinstance(base, ChannelShiftTranslator):
        return ChannelShiftTranslator(base.shape, base.mask,
                                      jit(base.target, 0.0, 1.0),
                                      jit(base.strength, 0.0, 1.0))
    if isinstance(base, DiagSmoothTranslator):
        sur = DiagSmoothTranslator(base.n, jit(base.gamma, 0.0, 0.99),
                                   jit(base.coupling, 0.0, 1.0), base.seed)
        noisy = base.mixing * (1.0 + scale * rng.standard_normal(base.mixing.shape))
        noisy = np.abs(noisy)
        sur.mixing = noisy / noisy.sum(axis=1, keepdims=True)
        return sur
    if isinstance(base, LocalBlurResidualTranslator):
        return LocalBlurResidualTranslator(base.shape, jit(base.beta, 0.0, 1.0))
    raise TypeError(f"no surrogate recipe for {type(base).__name__}")
