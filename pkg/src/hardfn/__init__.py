"""Adversarial piecewise-quadratic objectives and their inductive construction."""

from .checks import check_large_steps, paired_runs, verify_construction
from .construction import (
    ConstructionResult,
    HardFnParams,
    build_hard_function,
    extend_plateau,
    floor_horizon,
    phase_index,
)
from .piecewise import PiecewiseQuadratic, Plateau, grad, hessian, value
from .serialize import dump_construction, load_construction, read_construction, save_construction

__all__ = [
    "check_large_steps",
    "paired_runs",
    "verify_construction",
    "ConstructionResult",
    "HardFnParams",
    "build_hard_function",
    "extend_plateau",
    "floor_horizon",
    "phase_index",
    "PiecewiseQuadratic",
    "Plateau",
    "grad",
    "hessian",
    "value",
    "dump_construction",
    "load_construction",
    "read_construction",
    "save_construction",
]
