"""Uniform stability of full-batch NAG through the five-symbol loss family."""

from .bounds import (
    C3,
    C4,
    check_loss_regularity,
    check_nag_uniform_upper,
    derived_quadratic_gap,
    nag_uniform_upper_report,
    quadratic_linear_lower,
    random_huber_scenario,
    risk_runs,
    stated_quadratic_gap,
    uniform_checkpoints,
    uniform_floor_horizon,
    uniform_gap,
    uniform_lower_bound,
    verify_reduction,
    verify_uniform_lower_bound,
)
from .losses import (
    MAX_SAMPLES,
    SYMBOLS,
    LossFamily,
    ReductionScenario,
    build_loss_family,
    build_reduction_scenario,
    derive_parameters,
    empirical_risk,
    format_scenario,
)

__all__ = [
    "C3",
    "C4",
    "check_loss_regularity",
    "check_nag_uniform_upper",
    "derived_quadratic_gap",
    "nag_uniform_upper_report",
    "quadratic_linear_lower",
    "random_huber_scenario",
    "risk_runs",
    "stated_quadratic_gap",
    "uniform_checkpoints",
    "uniform_floor_horizon",
    "uniform_gap",
    "uniform_lower_bound",
    "verify_reduction",
    "verify_uniform_lower_bound",
    "MAX_SAMPLES",
    "SYMBOLS",
    "LossFamily",
    "ReductionScenario",
    "build_loss_family",
    "build_reduction_scenario",
    "derive_parameters",
    "empirical_risk",
    "format_scenario",
]
