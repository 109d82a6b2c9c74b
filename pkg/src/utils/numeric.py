"""Floating-point helpers: point coercion, tolerance comparisons, overflow-safe powers."""

import math
from typing import Union

import numpy as np

DBL_EPS = float(np.finfo(float).eps)

PointLike = Union[float, int, np.ndarray, list, tuple]


def as_point(x: PointLike) -> np.ndarray:
    """Return a read-only 1-D float copy of ``x``."""
    point = np.atleast_1d(np.array(x, dtype=float))
    if point.ndim != 1:
        raise ValueError(f"Points must be scalars or 1-D vectors, got shape {point.shape}")
    point.setflags(write=False)
    return point


def rounding_allowance(magnitude: float, steps: int = 1) -> float:
    """Absolute error budget of ``steps`` chained float operations on values of ``magnitude``."""
    return 4.0 * DBL_EPS * max(int(steps), 1) * abs(float(magnitude))


def relative_deviation(a: float, b: float, scale: float = 0.0) -> float:
    denom = max(abs(a), abs(b), abs(scale))
    if denom == 0.0:
        return 0.0
    return abs(a - b) / denom


def pow3(k: int) -> float:
    # 3**k overflows a double past k = 646
    if k > 640:
        return math.inf
    return 3.0 ** k


def safe_exp(x: float) -> float:
    if x > 700.0:
        return math.inf
    return math.exp(x)
