"""First-order optimizers: canonical NAG, its two variants, GD and projected subgradient GD."""

from .momentum import check_momentum_sums, momentum_tail_sum, partial_product_sum
from .nag import (
    NagState,
    Trajectory,
    momentum_coeff,
    nag_step,
    run_gd,
    run_nag,
    run_projected_subgd,
)
from .objectives import (
    HuberObjective,
    LinearObjective,
    MaxAffineObjective,
    Objective,
    QuadraticObjective,
    WeightedSum,
    ZeroObjective,
    sample_regularity,
)
from .variants import (
    VariantConfig,
    VariantKind,
    VariantTrajectory,
    check_variant_equivalence,
    run_variant,
)

__all__ = [
    "check_momentum_sums",
    "momentum_tail_sum",
    "partial_product_sum",
    "NagState",
    "Trajectory",
    "momentum_coeff",
    "nag_step",
    "run_gd",
    "run_nag",
    "run_projected_subgd",
    "HuberObjective",
    "LinearObjective",
    "MaxAffineObjective",
    "Objective",
    "QuadraticObjective",
    "WeightedSum",
    "ZeroObjective",
    "sample_regularity",
    "VariantConfig",
    "VariantKind",
    "VariantTrajectory",
    "check_variant_equivalence",
    "run_variant",
]
