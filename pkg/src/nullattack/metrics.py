"""Scores and summary statistics over attack runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_vector


class DegenerateOracleError(ValueError):
    pass


def nullifying_score(output, x0, y0) -> float:
    """Normalized score in (-inf, 100]; 100 iff output equals the input.

    s = (1 - |T(x*) - x0|^2 / |y0 - x0|^2) * 100.
    """
    output = as_vector(output)
    x0 = as_vector(x0)
    y0 = as_vector(y0)
    base = y0 - x0
    denom = float(base @ base)
    if np.sqrt(denom) <= 1e-12:
        raise DegenerateOracleError("threat model is identity on this input")
    d = output - x0
    return (1.0 - float(d @ d) / denom) * 100.0


@dataclass(frozen=True)
class RunOutcome:
    """One attack run's result, as consumed by aggregation."""

    variant: str
    run_id: str
    success: bool
    queries: int
    budget: int
    final_score: float
    error: str | None = None


@dataclass(frozen=True)
class SummaryRow:
    variant: str
    asr: float
    q_mean: float
    q_median: float
    q_success_mean: float  # secondary: queries averaged over successes only
    score_mean: float
    runs: int


def aggregate(outcomes: list[RunOutcome]) -> list[SummaryRow]:
    """Per-variant summary. Failed runs contribute the full budget to Q."""
    if not outcomes:
        raise ValueError("empty suite")
    rows = []
    for variant in sorted({o.variant for o in outcomes}):
        group = [o for o in outcomes if o.variant == variant]
        attempted = np.array([o.queries if o.success else o.budget for o in group],
                             dtype=np.float64)
        succ = [o for o in group if o.success]
        rows.append(SummaryRow(
            variant=variant,
            asr=100.0 * len(succ) / len(group),
            q_mean=float(attempted.mean()),
            q_median=float(np.median(attempted)),
            q_success_mean=float(np.mean([o.queries for o in succ])) if succ else float("nan"),
            score_mean=float(np.mean([o.final_score for o in group])),
            runs=len(group),
        ))
    return rows


def format_summary(rows: list[SummaryRow]) -> str:
    header = ("variant", "runs", "ASR", "Q_mean", "Q_median", "Q_succ_mean",
              "score_mean")
    out = ["\t".join(header)]
    for r in rows:
        out.append("\t".join([
            r.variant, str(r.runs), f"{r.asr:.1f}", f"{r.q_mean:.1f}",
            f"{r.q_median:.1f}", f"{r.q_success_mean:.1f}", f"{r.score_mean:.2f}",
        ]))
    return "\n".join(out)
