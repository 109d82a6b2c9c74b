"""Per-step divergence record between two runs started eps apart."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from src.utils.checks import CheckReport
from src.utils.csv_utils import write_csv
from src.utils.numeric import DBL_EPS

# lower curve c2 * exp(c1 * eta * beta * t) * eps
C1 = math.log(3.0) / 11.0
C2 = (4.0 / 5.0) * 3.0**-3

DIVERGENCE_HEADER = ["t", "dx", "dy", "dm", "dgrad", "lower_bound", "floor"]


def lower_curve(t, eps: float, eta: float, beta: float, c1: float = C1, c2: float = C2):
    """c2 * exp(c1 * eta * beta * t) * eps, elementwise over ``t``; overflows to inf."""
    with np.errstate(over="ignore"):
        return c2 * np.exp(c1 * eta * beta * np.asarray(t, dtype=float)) * eps


@dataclass(frozen=True, eq=False)
class DivergenceReport:
    """Differences (run from x0) - (run from x0~) of x, y, m and the gradient at y.

    Arrays have one row per step 0..T. One-dimensional runs keep the sign; in higher
    dimension ``magnitude`` gives Euclidean norms.
    """

    dx: np.ndarray
    dy: np.ndarray
    dm: np.ndarray
    dgrad: np.ndarray
    eps: float
    eta: float
    beta: Optional[float] = None
    G: Optional[float] = None
    checkpoints: Tuple[int, ...] = ()
    checks: CheckReport = field(default_factory=CheckReport)
    position_scale: Optional[np.ndarray] = None

    @property
    def steps(self) -> int:
        return self.dx.shape[0] - 1

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.steps + 1)

    @property
    def one_dimensional(self) -> bool:
        return self.dx.shape[1] == 1

    def signed(self, name: str) -> np.ndarray:
        values = getattr(self, name)
        if not self.one_dimensional:
            raise ValueError(f"{name} has no sign in dimension {values.shape[1]}")
        return values[:, 0]

    def magnitude(self, name: str) -> np.ndarray:
        values = getattr(self, name)
        if self.one_dimensional:
            return np.abs(values[:, 0])
        return np.linalg.norm(values, axis=1)

    @property
    def floor(self) -> float:
        if self.G is None or self.beta is None:
            return math.nan
        return self.G / (3.0 * self.beta)

    def allowances(self) -> np.ndarray:
        """Rounding budget of a difference at each step, from the run magnitudes so far."""
        if self.position_scale is None:
            return np.zeros(self.steps + 1)
        running = np.maximum.accumulate(self.position_scale)
        return 4.0 * DBL_EPS * np.maximum(self.t, 1) * running

    def allowance(self, t: int) -> float:
        return float(self.allowances()[t])

    def lower_bound(self) -> np.ndarray:
        if self.beta is None:
            return np.full(self.steps + 1, math.nan)
        return lower_curve(self.t, self.eps, self.eta, self.beta)

    def _column(self, name: str) -> np.ndarray:
        return self.signed(name) if self.one_dimensional else self.magnitude(name)

    def iter_rows(self) -> Iterator[List[Union[int, float]]]:
        columns = [self._column(name) for name in ("dx", "dy", "dm", "dgrad")]
        lower = self.lower_bound()
        floor = self.floor
        for t in range(self.steps + 1):
            yield [t] + [float(c[t]) for c in columns] + [float(lower[t]), floor]

    def to_csv(self, path: Union[str, Path]) -> Path:
        return write_csv(path, DIVERGENCE_HEADER, self.iter_rows())
