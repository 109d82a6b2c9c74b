"""Divergence between perturbed runs and checks of the stability lower and upper bounds."""

from .divergence import check_recurrences, divergence_series
from .lower import (
    check_sandwich,
    construction_series,
    sign_alternations,
    verify_evolution,
    verify_exponential_divergence,
)
from .report import C1, C2, DivergenceReport, lower_curve
from .upper import (
    check_gd_nonsmooth,
    check_gd_smooth_upper,
    check_nag_convex_upper,
    check_nag_quadratic_upper,
    nag_convex_upper_report,
)

__all__ = [
    "check_recurrences",
    "divergence_series",
    "check_sandwich",
    "construction_series",
    "sign_alternations",
    "verify_evolution",
    "verify_exponential_divergence",
    "C1",
    "C2",
    "DivergenceReport",
    "lower_curve",
    "check_gd_nonsmooth",
    "check_gd_smooth_upper",
    "check_nag_convex_upper",
    "check_nag_quadratic_upper",
    "nag_convex_upper_report",
]
