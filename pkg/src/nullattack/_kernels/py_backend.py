"""Pure numpy implementations of the hot-loop kernels.

Semantics must match ``_cy_core`` exactly; the test suite cross-checks the
two backends. Keep float64 throughout.
"""

import numpy as np

NAME = "python"


def project(x, lo, hi):
    """Per-coordinate clamp of ``x`` into ``[lo, hi]``."""
    return np.clip(x, lo, hi)


def weighted_mean(dirs, weights):
    """Return (1/q) * sum_i weights[i] * dirs[i]."""
    return dirs.T @ weights / len(weights)


def slide(s1, s2, length, lo, hi, max_steps, tol=1e-12):
    """Extend the projected step ``s1 -> s2`` along the box boundary.

    Successive segments follow the direction of the previous realized
    segment, re-projected into the box, until the accumulated trajectory
    length reaches ``length`` or the direction degenerates.

    Returns ``(final, steps, recovered, path)`` where ``path`` holds every
    accepted point after ``s1`` (so feasibility of the whole trajectory can
    be audited).
    """
    recovered = float(np.linalg.norm(s2 - s1))
    steps = 1
    path = [s2]
    prev2, prev = s1, s2
    while recovered < length - tol and steps < max_steps:
        direction = prev - prev2
        norm = float(np.linalg.norm(direction))
        if norm < tol:
            break
        remaining = length - recovered
        cand = np.clip(prev + (remaining / norm) * direction, lo, hi)
        seg = float(np.linalg.norm(cand - prev))
        if seg < tol:
            break
        recovered += seg
        steps += 1
        prev2, prev = prev, cand
        path.append(cand)
    return prev, steps, recovered, path
