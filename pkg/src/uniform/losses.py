"""Five-symbol loss family and the two samples that differ in their first example."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from src.errors import DomainError
from src.hardfn.construction import ConstructionResult, HardFnParams, build_hard_function
from src.hardfn.piecewise import PiecewiseQuadratic
from src.optim.objectives import LinearObjective, Objective, WeightedSum, ZeroObjective
from src.utils.csv_utils import format_float

logger = logging.getLogger(__name__)

SYMBOLS = (1, 2, 3, 4, 5)
# keeps eps above the construction's rounding floor
MAX_SAMPLES = 1_000_000


def derive_parameters(hat_G: float, hat_beta: float, hat_eta: float, n: int) -> HardFnParams:
    """G = G^, beta = beta^, eta = (n - 3)/n eta^, eps = beta eta^2 G / (n - 3)."""
    if n < 4:
        raise DomainError(f"sample size must be at least 4, got {n}")
    if not hat_eta > 0 or hat_eta * hat_beta > 1.0:
        raise DomainError(f"need 0 < eta^ <= 1/beta^, got eta^={hat_eta}, beta^={hat_beta}")
    eta = (n - 3) / n * hat_eta
    eps = hat_beta * eta * eta * hat_G / (n - 3)
    try:
        return HardFnParams(G=hat_G, beta=hat_beta, eta=eta, eps=eps)
    except DomainError as e:
        raise DomainError(f"Derived parameters (eta={eta!r}, eps={eps!r}) are invalid: {e}") from e


@dataclass(frozen=True, eq=False)
class LossFamily:
    hat_G: float
    hat_beta: float
    hat_eta: float
    params: HardFnParams
    construction: ConstructionResult
    losses: Dict[int, Objective] = field(default_factory=dict)

    def loss(self, z: int) -> Objective:
        if z not in self.losses:
            raise DomainError(f"unknown symbol {z}, expected one of {SYMBOLS}")
        return self.losses[z]

    @property
    def g2(self) -> PiecewiseQuadratic:
        loss = self.losses[2]
        assert isinstance(loss, PiecewiseQuadratic)
        return loss


def build_loss_family(
    hat_G: float, hat_beta: float, hat_eta: float, n: int
) -> LossFamily:
    params = derive_parameters(hat_G, hat_beta, hat_eta, n)
    cr = build_hard_function(params)
    G, beta, eta = params.G, params.beta, params.eta
    upper = eta * G
    losses: Dict[int, Objective] = {
        1: ZeroObjective(1),
        # slope -beta eta G, curvature beta on [0, eta G]: flat from eta G on
        2: PiecewiseQuadratic(G=beta * upper, beta=beta, intervals=((0.0, upper),)),
        3: LinearObjective(-G),
        4: LinearObjective(G),
        5: cr.f_M_plus,
    }
    return LossFamily(hat_G, hat_beta, hat_eta, params, cr, losses)


def empirical_risk(family: LossFamily, sample: Sequence[int]) -> WeightedSum:
    """(1/n) sum of the sample's losses, grouped by symbol and summed in symbol order."""
    n = len(sample)
    if n == 0:
        raise DomainError("empty sample")
    counts = Counter(sample)
    unknown = set(counts) - set(SYMBOLS)
    if unknown:
        raise DomainError(f"unknown symbols in sample: {sorted(unknown)}")
    return WeightedSum([(counts[z] / n, family.loss(z)) for z in SYMBOLS if counts[z]])


@dataclass(frozen=True, eq=False)
class ReductionScenario:
    n: int
    family: LossFamily
    S: Tuple[int, ...]
    S_prime: Tuple[int, ...]
    R_S: WeightedSum
    R_S_prime: WeightedSum

    @property
    def params(self) -> HardFnParams:
        return self.family.params

    @property
    def construction(self) -> ConstructionResult:
        return self.family.construction

    @property
    def hat_eta(self) -> float:
        return self.family.hat_eta


def build_reduction_scenario(
    hat_G: float, hat_beta: float, hat_eta: float, n: int
) -> ReductionScenario:
    if n > MAX_SAMPLES:
        raise DomainError(f"sample size {n} exceeds {MAX_SAMPLES}")
    family = build_loss_family(hat_G, hat_beta, hat_eta, n)
    tail = (3, 4) + (5,) * (n - 3)
    S = (1,) + tail
    S_prime = (2,) + tail
    logger.info(
        "Reduction scenario n=%d: eta=%.6g eps=%.6g M=%d",
        n,
        family.params.eta,
        family.params.eps,
        family.construction.M,
    )
    return ReductionScenario(
        n=n,
        family=family,
        S=S,
        S_prime=S_prime,
        R_S=empirical_risk(family, S),
        R_S_prime=empirical_risk(family, S_prime),
    )


def format_scenario(sc: ReductionScenario, construction_path: Optional[str] = None) -> str:
    p = sc.params
    lines = [
        f"n = {sc.n}",
        f"G = {format_float(p.G)}",
        f"beta = {format_float(p.beta)}",
        f"eta = {format_float(p.eta)}",
        f"eps = {format_float(p.eps)}",
        f"hat_eta = {format_float(sc.hat_eta)}",
        f"M = {sc.construction.M}",
    ]
    if construction_path is not None:
        lines.append(f"construction = {construction_path}")
    return "\n".join(lines) + "\n"
