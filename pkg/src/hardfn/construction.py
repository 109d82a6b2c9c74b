"""Inductive builder of the adversarial objective f_M and its plateau extension f_M^+.

Phase i runs NAG for n_i = ceil(10 / (eta beta)) (i + 2) steps on f_{i-1} from 0 and
from eps, and adds curvature beta on the interval spanned by the two y_{n_i}. The build
stops at the first phase whose interval would push the covered length to G / (2 beta);
that phase's interval is kept for verification but not added.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

from src.errors import ConstructionError, DomainError, RunawayConstructionError
from src.hardfn.piecewise import Interval, PiecewiseQuadratic, Plateau
from src.optim.nag import run_nag

logger = logging.getLogger(__name__)

# smallest eps relative to the trajectory magnitudes
FLOAT_GUARD = 1e-12


def phase_index(i: int, eta: float, beta: float) -> int:
    """n_i = ceil(10 / (eta beta)) * (i + 2)."""
    if i < 0:
        raise DomainError(f"phase must be >= 0, got {i}")
    product = eta * beta
    if not product > 0:
        raise DomainError(f"eta * beta must be positive, got {product}")
    return math.ceil(10.0 / product) * (i + 2)


@dataclass(frozen=True)
class HardFnParams:
    G: float
    beta: float
    eta: float
    eps: float

    def __post_init__(self):
        if not self.G > 0 or not self.beta > 0:
            raise DomainError(f"G and beta must be positive, got G={self.G}, beta={self.beta}")
        if not self.eta > 0 or self.eta * self.beta > 1.0:
            raise DomainError(f"need 0 < eta <= 1/beta, got eta={self.eta}, beta={self.beta}")
        if not 0 < self.eps < self.G / (2 * self.beta):
            raise DomainError(
                f"need 0 < eps < G/(2 beta) = {self.G / (2 * self.beta)!r}, got eps={self.eps!r}"
            )

    @property
    def block(self) -> int:
        return math.ceil(10.0 / (self.eta * self.beta))

    @property
    def target_length(self) -> float:
        return self.G / (2.0 * self.beta)

    @property
    def floor(self) -> float:
        return self.G / (3.0 * self.beta)

    @property
    def log_ratio(self) -> float:
        """ln(3G / (2 beta eps)), the logarithmic phase budget."""
        return math.log(3.0 * self.G / (2.0 * self.beta * self.eps))

    @property
    def phase_limit(self) -> int:
        return math.ceil(self.log_ratio) + 2

    def checkpoint(self, i: int) -> int:
        return phase_index(i, self.eta, self.beta)


def floor_horizon(params: HardFnParams) -> int:
    """Largest integer at or below ceil(10/(eta beta)) (ln(3G/(2 beta eps)) + 3).

    Steps strictly after this index are past the divergence floor horizon.
    """
    return math.floor(params.block * (params.log_ratio + 3.0))


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    params: HardFnParams
    checkpoints: Tuple[int, ...]
    phase_intervals: Tuple[Interval, ...]
    M: int
    f_M: PiecewiseQuadratic
    f_M_plus: PiecewiseQuadratic
    minimizer: float

    @property
    def widths(self) -> List[float]:
        return [b - a for a, b in self.phase_intervals]

    @property
    def plateau(self) -> Plateau:
        assert self.f_M_plus.plateau is not None
        return self.f_M_plus.plateau

    def __str__(self):
        return (
            f"Construction(M={self.M}, n={list(self.checkpoints)}, "
            f"x*={self.minimizer:.6g}, covered={self.f_M.covered_length:.6g})"
        )


def plateau_for(f_M: PiecewiseQuadratic) -> PiecewiseQuadratic:
    if not f_M.intervals:
        raise DomainError("plateau extension needs at least one interval")
    p = f_M.intervals[-1][1]
    return f_M.with_plateau(Plateau(p=p, g_p=f_M.grad(p)))


def extend_plateau(result: ConstructionResult) -> PiecewiseQuadratic:
    if result.M < 1:
        raise DomainError(f"plateau extension needs M >= 1, got {result.M}")
    return plateau_for(result.f_M)


def build_hard_function(params: HardFnParams) -> ConstructionResult:
    f = PiecewiseQuadratic(params.G, params.beta)
    checkpoints: List[int] = []
    intervals: List[Interval] = []
    y_range = 0.0
    i = 1
    while True:
        if i > params.phase_limit:
            raise RunawayConstructionError(
                f"Construction needs more than {params.phase_limit} phases", phase=i
            )
        n_i = params.checkpoint(i)
        y = run_nag(f, 0.0, n_i, params.eta).ys[n_i, 0]
        y_tilde = run_nag(f, params.eps, n_i, params.eta).ys[n_i, 0]
        a, b = min(y, y_tilde), max(y, y_tilde)
        if intervals and not a > intervals[-1][1]:
            raise ConstructionError(
                f"Phase {i} interval [{a!r}, {b!r}] overlaps or precedes [{intervals[-1][0]!r}, "
                f"{intervals[-1][1]!r}]",
                phase=i,
            )
        checkpoints.append(n_i)
        intervals.append((a, b))
        y_range = max(y_range, abs(a), abs(b))
        total = f.covered_length + (b - a)
        logger.debug("Phase %d: n=%d interval=[%.17g, %.17g] covered=%.6g", i, n_i, a, b, total)
        if total >= params.target_length:
            break
        f = f.with_interval(a, b)
        i += 1

    M = i - 1
    if M < 1:
        raise ConstructionError(f"first phase already covers {total!r}", phase=1)
    if params.eps < FLOAT_GUARD * max(1.0, y_range):
        raise DomainError(
            f"eps={params.eps!r} is below the rounding floor of trajectories reaching {y_range:.6g}"
        )
    f_M_plus = plateau_for(f)
    minimizer = f_M_plus.minimizer
    assert minimizer is not None
    logger.info(
        "Built hard function: M=%d, checkpoints=%s, minimizer=%.6g", M, checkpoints, minimizer
    )
    return ConstructionResult(
        params=params,
        checkpoints=tuple(checkpoints),
        phase_intervals=tuple(intervals),
        M=M,
        f_M=f,
        f_M_plus=f_M_plus,
        minimizer=minimizer,
    )
