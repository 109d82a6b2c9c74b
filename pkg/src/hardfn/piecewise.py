"""One-dimensional convex objectives: slope -G plus curvature beta on a set of intervals."""

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DomainError
from src.optim.objectives import Objective

Interval = Tuple[float, float]


@dataclass(frozen=True)
class Plateau:
    """Quadratic continuation right of ``p``, starting from slope ``g_p``, flat from x* on."""

    p: float
    g_p: float

    def __post_init__(self):
        if not self.g_p <= 0.0:
            raise DomainError(f"plateau slope must be <= 0, got {self.g_p}")


class PiecewiseQuadratic(Objective):
    """f(x) = -G x + beta * integral of (covered length of the intervals up to z) dz.

    The gradient is -G + beta * covered(x), where covered(x) is the total length of
    the closed intervals intersected with (-inf, x]. Values are anchored at f(0) = 0
    for the un-extended part. A ``Plateau`` replaces everything right of p by
    f(p) + g_p (x - p) + beta (x - p)^2 / 2 up to its minimizer x* = p - g_p / beta.
    """

    name = "piecewise-quadratic"

    def __init__(
        self,
        G: float,
        beta: float,
        intervals: Iterable[Sequence[float]] = (),
        plateau: Optional[Plateau] = None,
    ):
        if not G > 0 or not beta > 0:
            raise DomainError(f"G and beta must be positive, got G={G}, beta={beta}")
        self.G = float(G)
        self.beta = float(beta)
        self.smoothness = self.beta
        self.intervals: Tuple[Interval, ...] = tuple((float(a), float(b)) for a, b in intervals)
        self.plateau = plateau

        self._starts: List[float] = []
        self._ends: List[float] = []
        self._prefix: List[float] = [0.0]
        self._qa: List[float] = []
        self._qb: List[float] = []
        q = 0.0
        previous_end = -np.inf
        for j, (a, b) in enumerate(self.intervals):
            if not a <= b:
                raise DomainError(f"Interval {j + 1} is reversed: [{a!r}, {b!r}]")
            if not a > previous_end:
                raise DomainError(
                    f"Interval {j + 1} [{a!r}, {b!r}] does not lie right of {previous_end!r}"
                )
            covered = self._prefix[-1]
            if j > 0:
                q = q + covered * (a - previous_end)
            self._qa.append(q)
            width = b - a
            q = q + covered * width + 0.5 * width * width
            self._qb.append(q)
            self._starts.append(a)
            self._ends.append(b)
            self._prefix.append(covered + width)
            previous_end = b

        self._q0 = self._integral(0.0)
        self._x_star: Optional[float] = None
        self._value_p = 0.0
        if plateau is not None:
            if self._ends and plateau.p < self._ends[-1]:
                raise DomainError(f"plateau start {plateau.p!r} lies left of the last interval")
            self._x_star = plateau.p - plateau.g_p / self.beta
            self._value_p = self._base_value(plateau.p)

    @property
    def dimension(self) -> int:
        return 1

    @property
    def covered_length(self) -> float:
        return self._prefix[-1]

    @property
    def max_slope(self) -> float:
        """Largest derivative left of the plateau."""
        return -self.G + self.beta * self.covered_length

    @property
    def minimizer(self) -> Optional[float]:
        return self._x_star

    def covered(self, x: float) -> float:
        k = bisect_right(self._starts, x)
        if k == 0:
            return 0.0
        j = k - 1
        return self._prefix[j] + (min(x, self._ends[j]) - self._starts[j])

    def _integral(self, x: float) -> float:
        k = bisect_right(self._starts, x)
        if k == 0:
            return 0.0
        j = k - 1
        a, b = self._starts[j], self._ends[j]
        if x <= b:
            r = x - a
            return self._qa[j] + self._prefix[j] * r + 0.5 * r * r
        return self._qb[j] + self._prefix[j + 1] * (x - b)

    def _base_value(self, x: float) -> float:
        return -self.G * x + self.beta * (self._integral(x) - self._q0)

    def grad(self, x: float) -> float:
        x = float(x)
        if self.plateau is not None and x > self.plateau.p:
            if x >= self._x_star:
                return 0.0
            return self.plateau.g_p + self.beta * (x - self.plateau.p)
        return -self.G + self.beta * self.covered(x)

    def value(self, x: float) -> float:
        x = float(x)
        if self.plateau is not None and x > self.plateau.p:
            r = min(x, self._x_star) - self.plateau.p
            return self._value_p + self.plateau.g_p * r + 0.5 * self.beta * r * r
        return self._base_value(x)

    def hessian(self, x: float) -> float:
        """beta inside a closed interval or inside the plateau band (p, x*], else 0."""
        x = float(x)
        if self.plateau is not None and x > self.plateau.p:
            return self.beta if x <= self._x_star else 0.0
        k = bisect_right(self._starts, x)
        if k > 0 and x <= self._ends[k - 1]:
            return self.beta
        return 0.0

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        return np.array([self.grad(x[0])])

    def value_at(self, x: np.ndarray) -> float:
        return self.value(np.asarray(x, dtype=float)[0])

    def with_interval(self, a: float, b: float) -> "PiecewiseQuadratic":
        if self.plateau is not None:
            raise DomainError("cannot add intervals to a function with a plateau")
        return PiecewiseQuadratic(self.G, self.beta, self.intervals + ((a, b),))

    def with_plateau(self, plateau: Plateau) -> "PiecewiseQuadratic":
        return PiecewiseQuadratic(self.G, self.beta, self.intervals, plateau)

    def truncated(self, count: int) -> "PiecewiseQuadratic":
        """The same function restricted to its first ``count`` intervals, without plateau."""
        if not 0 <= count <= len(self.intervals):
            raise DomainError(f"cannot keep {count} of {len(self.intervals)} intervals")
        return PiecewiseQuadratic(self.G, self.beta, self.intervals[:count])

    def __repr__(self):
        extra = f", plateau={self.plateau}" if self.plateau is not None else ""
        return (
            f"PiecewiseQuadratic(G={self.G!r}, beta={self.beta!r}, "
            f"intervals={len(self.intervals)}{extra})"
        )


def grad(f: PiecewiseQuadratic, x: float) -> float:
    return f.grad(x)


def value(f: PiecewiseQuadratic, x: float) -> float:
    return f.value(x)


def hessian(f: PiecewiseQuadratic, x: float) -> float:
    return f.hessian(x)
