"""Brute-force verification oracles: finite differences and Jacobian probes.

These are desk-scale test instruments. They never touch attack query
counters; verification queries live in their own namespace.
"""

from __future__ import annotations

import numpy as np

from .core import as_vector
from .oracle import TranslationOracle

JACOBIAN_MAX_DIM = 256


def finite_difference_gradient(loss, x, h: float) -> np.ndarray:
    """Central differences per coordinate; 2N loss evaluations."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = as_vector(x)
    grad = np.empty(x.size)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        fp = float(loss(xp))
        fm = float(loss(xm))
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise ValueError(f"non-finite loss at coordinate {i}")
        grad[i] = (fp - fm) / (2.0 * h)
    return grad


def finite_difference_jacobian(oracle: TranslationOracle, x, h: float) -> np.ndarray:
    """Forward-difference response columns: J[:, i] = (T(x + h e_i) - T(x)) / h."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = as_vector(x)
    if x.size > JACOBIAN_MAX_DIM:
        raise ValueError("Jacobian oracle is desk-scale only")
    base = oracle.raw(x)
    jac = np.empty((x.size, x.size))
    for i in range(x.size):
        xp = x.copy()
        xp[i] += h
        jac[:, i] = (oracle.raw(xp) - base) / h
    return jac


def diagonality_metric(jac: np.ndarray) -> float:
    """Fraction of squared Frobenius mass on the diagonal, in [0,1]."""
    jac = np.asarray(jac, dtype=np.float64)
    if jac.ndim != 2 or jac.shape[0] != jac.shape[1]:
        raise ValueError("square matrix required")
    total = float(np.sum(jac * jac))
    if total == 0.0:
        raise ValueError("degenerate Jacobian")
    return float(np.sum(np.diag(jac) ** 2) / total)
