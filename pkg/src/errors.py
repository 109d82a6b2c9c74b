"""Exception hierarchy shared by all subpackages."""

from typing import Any, Optional

import numpy as np


class StabilityLabError(Exception):
    """Base class for errors raised by this package."""


class DomainError(StabilityLabError, ValueError):
    """Raised when an operation is called outside its precondition."""


class NumericError(StabilityLabError, ArithmeticError):
    """Raised when an objective returns a non-finite gradient."""

    def __init__(self, message: str, point: Any = None, step: Optional[int] = None):
        super().__init__(message)
        self.point = None if point is None else np.array(point, dtype=float)
        self.step = step


class ConstructionError(StabilityLabError):
    """Raised when the hard-function builder breaks one of its placement invariants."""

    def __init__(self, message: str, phase: Optional[int] = None):
        super().__init__(message)
        self.phase = phase


class RunawayConstructionError(ConstructionError):
    """Raised when the builder needs more phases than the logarithmic bound allows."""


class CheckFailure(StabilityLabError, AssertionError):
    """Raised when a numerical check of a stability bound fails."""

    def __init__(self, check: str, observed: float, required: float, **context: Any):
        self.check = check
        self.observed = observed
        self.required = required
        self.context = context
        details = ", ".join(f"{k}={v}" for k, v in context.items())
        message = f"Check '{check}' failed: observed {observed!r}, required {required!r}"
        if details:
            message = f"{message} ({details})"
        super().__init__(message)


class UsageError(StabilityLabError):
    """Raised for invalid command lines and configuration files."""

    def __init__(self, message: str, token: Optional[str] = None):
        super().__init__(message)
        self.token = token
