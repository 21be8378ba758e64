"""Constrained zeroth-order optimization toolkit for nullifying attacks on
image-translation oracles.

Hot numeric kernels come from a compiled extension when available; set
``NULLATTACK_BACKEND`` to ``python`` or ``cython`` to force one (``auto``
by default). ``nullattack.BACKEND`` reports the active choice.
"""

from ._kernels import BACKEND
from .attack import (AttackConfig, AttackResult, ConfigError, StepRecord,
                     VARIANT_NAMES, gradient_slide, pgd_step, read_trace,
                     run_attack, variant_wiring, write_trace)
from .core import (BoxLimit, FrozenIterateError, clip_offset, limit_ranges,
                   make_rng, project, sample_hyperellipsoid,
                   sample_unit_sphere, scale_vector)
from .estimator import (AlphaEstimate, GradientEstimate, PriorVector,
                        estimate_alpha, limit_aware_rgf, optimal_lambda,
                        prior_guided_samples, rgf_estimate,
                        self_guiding_prior, transfer_prior)
from .io import export_png, read_zgv, write_zgv
from .metrics import (DegenerateOracleError, RunOutcome, SummaryRow, aggregate,
                      format_summary, nullifying_score)
from .oracle import (BudgetExhaustedError, ChannelShiftTranslator,
                     DiagSmoothTranslator, LocalBlurResidualTranslator,
                     QueryCounter, TranslationOracle, build_synthetic,
                     make_surrogate)
from .probes import run_verification
from .suite import ExperimentSuite, oracle_from_spec, run_suite

__version__ = "0.1.0"

__all__ = [
    "AlphaEstimate", "AttackConfig", "AttackResult", "BACKEND", "BoxLimit",
    "BudgetExhaustedError", "ChannelShiftTranslator", "ConfigError",
    "DegenerateOracleError", "DiagSmoothTranslator", "ExperimentSuite",
    "FrozenIterateError", "GradientEstimate", "LocalBlurResidualTranslator",
    "PriorVector", "QueryCounter", "RunOutcome", "StepRecord", "SummaryRow",
    "TranslationOracle", "VARIANT_NAMES", "aggregate", "build_synthetic",
    "clip_offset", "estimate_alpha", "export_png", "format_summary",
    "gradient_slide", "limit_aware_rgf", "limit_ranges", "make_rng",
    "make_surrogate", "nullifying_score", "optimal_lambda", "oracle_from_spec",
    "pgd_step", "prior_guided_samples", "project", "read_trace", "read_zgv",
    "rgf_estimate", "run_attack", "run_suite", "run_verification",
    "sample_hyperellipsoid", "sample_unit_sphere", "scale_vector",
    "self_guiding_prior", "transfer_prior", "variant_wiring", "write_trace",
    "write_zgv", "__version__",
]
