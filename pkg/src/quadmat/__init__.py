"""Transfer-matrix analysis of NAG on quadratics."""

from .bounds import (
    SCHEDULE_HEADER,
    canonical_matrices,
    check_block_reduction,
    check_linear_norm_bound,
    counterexample_norm,
    counterexample_schedule,
    cross_validate_transfer,
    prefix_norms,
    random_quadratic_instance,
    random_schedule,
    schedule_rows,
)
from .transfer import (
    TransferMatrix,
    build_transfer,
    check_schur_power,
    nag_quadratic_divergence_via_transfer,
    norm_2x2,
    product_matrix,
    product_norm,
    schur_power,
    spectral_norm,
)

__all__ = [
    "SCHEDULE_HEADER",
    "canonical_matrices",
    "check_block_reduction",
    "check_linear_norm_bound",
    "counterexample_norm",
    "counterexample_schedule",
    "cross_validate_transfer",
    "prefix_norms",
    "random_quadratic_instance",
    "random_schedule",
    "schedule_rows",
    "TransferMatrix",
    "build_transfer",
    "check_schur_power",
    "nag_quadratic_divergence_via_transfer",
    "norm_2x2",
    "product_matrix",
    "product_norm",
    "schur_power",
    "spectral_norm",
]
