"""Box limits, projection, limit-aware scale vectors and direction sampling.

All state is carried as flat float64 numpy arrays (row-major, channel-last
when the vector represents an image). Randomness always flows through an
explicit ``numpy.random.Generator`` created by :func:`make_rng`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

FEASIBILITY_TOL = 1e-12

RNG_ALGORITHM = "pcg64"


class FrozenIterateError(RuntimeError):
    """Raised when every coordinate of the iterate has zero adjustment room."""


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator; identical seed gives identical streams."""
    return np.random.Generator(np.random.PCG64(seed))


def as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty vector")
    return x


def check_finite(x: np.ndarray, what: str = "vector") -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite {what}")
    return x


@dataclass(frozen=True)
class BoxLimit:
    """Per-coordinate bounds: intersection of [0,1]^N with the l-inf ball.

    ``lo_i = max(0, x0_i - eps)`` and ``hi_i = min(1, x0_i + eps)``.
    """

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lo)
        hi = as_vector(self.hi)
        if lo.shape != hi.shape:
            raise ValueError("lo/hi length mismatch")
        if np.any(lo < -FEASIBILITY_TOL) or np.any(hi > 1 + FEASIBILITY_TOL):
            raise ValueError("box limit must lie within [0,1]")
        if np.any(lo > hi + FEASIBILITY_TOL):
            raise ValueError("lo must not exceed hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_center(cls, x0, eps: float) -> "BoxLimit":
        x0 = check_finite(as_vector(x0), "center")
        if eps <= 0:
            raise ValueError("eps must be positive")
        if np.any(x0 < 0) or np.any(x0 > 1):
            raise ValueError("center must lie in [0,1]^N")
        return cls(np.maximum(0.0, x0 - eps), np.minimum(1.0, x0 + eps))

    @property
    def n(self) -> int:
        return self.lo.size

    def contains(self, x, tol: float = FEASIBILITY_TOL) -> bool:
        x = as_vector(x)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def violation(self, x) -> float:
        """Largest distance by which ``x`` escapes the box (0 if inside)."""
        x = as_vector(x)
        over = np.maximum(x - self.hi, 0.0)
        under = np.maximum(self.lo - x, 0.0)
        return float(max(over.max(initial=0.0), under.max(initial=0.0)))


def project(x, limit: BoxLimit) -> np.ndarray:
    """Clamp ``x`` per coordinate into the limit. Idempotent."""
    x = check_finite(as_vector(x))
    return _kernels.project(x, limit.lo, limit.hi)


def clip_offset(d, omega_minus: np.ndarray, omega_plus: np.ndarray) -> np.ndarray:
    """Project an offset from the current iterate into the feasible ranges."""
    d = check_finite(as_vector(d), "offset")
    return _kernels.project(d, -omega_minus, omega_plus)


def limit_ranges(x, limit: BoxLimit):
    """Room to move up (``omega_plus``) and down (``omega_minus``) from x."""
    x = as_vector(x)
    if not limit.contains(x):
        raise ValueError("iterate escaped limit")
    omega_plus = np.maximum(limit.hi - x, 0.0)
    omega_minus = np.maximum(x - limit.lo, 0.0)
    return omega_plus, omega_minus


def scale_vector(omega_plus, omega_minus, mode: str = "min") -> np.ndarray:
    """Per-coordinate symmetric adjustment range.

    ``min`` (the default) is the only reading under which both antithetic
    probes x + d and x - d are guaranteed feasible; ``mean`` is kept for
    fidelity experiments.
    """
    omega_plus = as_vector(omega_plus)
    omega_minus = as_vector(omega_minus)
    if np.any(omega_plus < 0) or np.any(omega_minus < 0):
        raise ValueError("ranges must be nonnegative")
    if mode == "min":
        return np.minimum(omega_plus, omega_minus)
    if mode == "mean":
        return (omega_plus + omega_minus) / 2.0
    raise ValueError(f"unknown scale mode {mode!r}")


def sample_unit_sphere(dim: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples on the unit sphere (normalized Gaussian draws)."""
    if dim < 1 or n < 1:
        raise ValueError("dim and n must be >= 1")
    g = rng.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # zero draw has probability 0; resample defensively
    while np.any(norms == 0.0):
        bad = norms[:, 0] == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
    return g / norms


def sample_hyperellipsoid(b, n: int, rng: np.random.Generator) -> np.ndarray:
    """Samples from the hyperellipsoid with per-axis scales ``b``.

    Coordinates with zero scale stay exactly zero; the sphere is drawn in
    the free subspace so sum(xi_i^2 / b_i^2) = 1 over free coordinates.
    """
    b = as_vector(b)
    if np.any(b < 0):
        raise ValueError("scales must be nonnegative")
    free = b > 0
    nfree = int(free.sum())
    if nfree == 0:
        raise FrozenIterateError("fully frozen iterate")
    out = np.zeros((n, b.size))
    out[:, free] = sample_unit_sphere(nfree, n, rng) * b[free]
    return out
