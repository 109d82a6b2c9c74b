"""Objective functions consumed by the first-order runners."""

import logging
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import DomainError
from src.utils.numeric import PointLike, as_point

logger = logging.getLogger(__name__)


class Objective(ABC):
    """A function on R^d exposing a deterministic (sub)gradient.

    ``smoothness`` is the declared Lipschitz constant of the gradient, or None for
    non-smooth objectives.
    """

    name: str = "objective"
    smoothness: Optional[float] = None

    @property
    @abstractmethod
    def dimension(self) -> int:
        ...

    @abstractmethod
    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        ...

    def subgradient_at(self, x: np.ndarray) -> np.ndarray:
        return self.gradient_at(x)

    def value_at(self, x: np.ndarray) -> float:
        raise NotImplementedError(f"{self.name} does not expose values")

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


class ZeroObjective(Objective):
    name = "zero"

    def __init__(self, dimension: int = 1):
        if dimension < 1:
            raise DomainError(f"dimension must be positive, got {dimension}")
        self._dimension = dimension
        self.smoothness = 0.0

    @property
    def dimension(self) -> int:
        return self._dimension

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        return np.zeros(self._dimension)

    def value_at(self, x: np.ndarray) -> float:
        return 0.0


class LinearObjective(Objective):
    """f(x) = <slope, x>."""

    name = "linear"

    def __init__(self, slope: PointLike):
        self.slope = as_point(slope)
        self.smoothness = 0.0

    @property
    def dimension(self) -> int:
        return self.slope.shape[0]

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        return self.slope.copy()

    def value_at(self, x: np.ndarray) -> float:
        return float(self.slope @ np.asarray(x, dtype=float))


class QuadraticObjective(Objective):
    """f(x) = x^T H x / 2 + b^T x with H symmetric positive semi-definite."""

    name = "quadratic"

    def __init__(self, hessian: np.ndarray, linear: Optional[PointLike] = None):
        h = np.atleast_2d(np.array(hessian, dtype=float))
        if h.shape[0] != h.shape[1]:
            raise DomainError(f"Hessian must be square, got shape {h.shape}")
        if not np.allclose(h, h.T, rtol=0.0, atol=1e-12):
            raise DomainError("Hessian must be symmetric")
        eigenvalues = np.linalg.eigvalsh(h)
        if eigenvalues[0] < -1e-12:
            raise DomainError(f"Hessian must be PSD, smallest eigenvalue {eigenvalues[0]:.3e}")
        h.setflags(write=False)
        self.hessian = h
        self.eigenvalues = eigenvalues
        self.linear = as_point(np.zeros(h.shape[0]) if linear is None else linear)
        self.smoothness = float(max(eigenvalues[-1], 0.0))

    @property
    def dimension(self) -> int:
        return self.hessian.shape[0]

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        return self.hessian @ x + self.linear

    def value_at(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.hessian @ x + self.linear @ x)


class MaxAffineObjective(Objective):
    """f(x) = G * max{0, x_1 - c, ..., x_d - c}.

    Subgradient rule: the smallest-index coordinate attaining the max wins; the zero
    branch is used only when it is the unique maximizer.
    """

    name = "max-affine"

    def __init__(self, G: float, c: float, dimension: int):
        if G <= 0:
            raise DomainError(f"G must be positive, got {G}")
        if dimension < 1:
            raise DomainError(f"dimension must be positive, got {dimension}")
        self.G = float(G)
        self.c = float(c)
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        return self._dimension

    def active_coordinate(self, x: np.ndarray) -> Optional[int]:
        shifted = np.asarray(x, dtype=float) - self.c
        top = int(np.argmax(shifted))  # first index on ties
        if shifted[top] < 0.0:
            return None
        return top

    def subgradient_at(self, x: np.ndarray) -> np.ndarray:
        g = np.zeros(self._dimension)
        i = self.active_coordinate(x)
        if i is not None:
            g[i] = self.G
        return g

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        return self.subgradient_at(x)

    def value_at(self, x: np.ndarray) -> float:
        return self.G * max(0.0, float(np.max(np.asarray(x, dtype=float) - self.c)))


class HuberObjective(Objective):
    """G-Lipschitz, beta-smooth Huber loss centred at ``center`` (1-D)."""

    name = "huber"

    def __init__(self, center: float, G: float, beta: float):
        if G <= 0 or beta <= 0:
            raise DomainError(f"G and beta must be positive, got G={G}, beta={beta}")
        self.center = float(center)
        self.G = float(G)
        self.smoothness = float(beta)

    @property
    def dimension(self) -> int:
        return 1

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        r = float(x[0]) - self.center
        return np.array([min(self.G, max(-self.G, self.smoothness * r))])

    def value_at(self, x: np.ndarray) -> float:
        r = abs(float(x[0]) - self.center)
        knee = self.G / self.smoothness
        if r <= knee:
            return 0.5 * self.smoothness * r * r
        return self.G * r - 0.5 * self.G * knee


class WeightedSum(Objective):
    """sum_k w_k f_k, accumulated in term order starting from 0.0."""

    name = "weighted-sum"

    def __init__(self, terms: Sequence[Tuple[float, Objective]]):
        if not terms:
            raise DomainError("WeightedSum needs at least one term")
        dims = {f.dimension for _, f in terms}
        if len(dims) != 1:
            raise DomainError(f"Terms disagree on dimension: {sorted(dims)}")
        self.terms = tuple((float(w), f) for w, f in terms)
        self._dimension = dims.pop()
        smooth = [f.smoothness for _, f in self.terms]
        if all(s is not None for s in smooth):
            self.smoothness = float(sum(abs(w) * s for (w, _), s in zip(self.terms, smooth)))

    @property
    def dimension(self) -> int:
        return self._dimension

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        total = np.zeros(self._dimension)
        for w, f in self.terms:
            total = total + w * f.gradient_at(x)
        return total

    def value_at(self, x: np.ndarray) -> float:
        total = 0.0
        for w, f in self.terms:
            total = total + w * f.value_at(x)
        return total


def sample_regularity(
    f: Objective,
    low: float,
    high: float,
    pairs: int,
    rng: np.random.Generator,
    noise: float = 0.0,
) -> Tuple[float, float]:
    """Largest |grad| and largest |grad(u) - grad(v)| / |u - v| over random pairs in a box.

    ``noise`` is subtracted from every gradient difference before dividing, so rounding
    in gradients of large arguments does not register as curvature.
    """
    d = f.dimension
    us = rng.uniform(low, high, size=(pairs, d))
    vs = rng.uniform(low, high, size=(pairs, d))
    max_grad = 0.0
    max_ratio = 0.0
    for u, v in zip(us, vs):
        gu = f.gradient_at(u)
        gv = f.gradient_at(v)
        max_grad = max(max_grad, float(np.linalg.norm(gu)), float(np.linalg.norm(gv)))
        dist = float(np.linalg.norm(u - v))
        if dist > 0.0:
            excess = max(0.0, float(np.linalg.norm(gu - gv)) - noise)
            max_ratio = max(max_ratio, excess / dist)
    logger.debug(
        "Sampled %d pairs on %s: max|g|=%.6g, max ratio=%.6g", pairs, f.name, max_grad, max_ratio
    )
    return max_grad, max_ratio
