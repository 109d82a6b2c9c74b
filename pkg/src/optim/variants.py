"""Two re-parametrized NAG variants, implemented independently of ``nag.run_nag``.

variant1 uses weights tau_t = 2/(t+2) and a dual sequence z with steps (t+2)/(2 beta);
it reproduces canonical NAG with eta = 1/beta. variant2 uses the aggregated/middle
point form with beta_t = (t+1)/2 and gamma_t = (t+1)/(4 beta); it reproduces canonical
NAG with eta = 1/(2 beta).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from src.errors import DomainError
from src.optim.nag import checked_gradient, run_nag
from src.optim.objectives import Objective
from src.utils.numeric import PointLike, as_point

logger = logging.getLogger(__name__)

FLAT_BETA = 1.0


class VariantKind(str, Enum):
    CANONICAL = "canonical"
    VARIANT1 = "variant1"
    VARIANT2 = "variant2"


@dataclass(frozen=True)
class VariantConfig:
    kind: VariantKind
    beta: float

    def __post_init__(self):
        try:
            kind = VariantKind(self.kind)
        except ValueError:
            raise DomainError(f"Unsupported variant kind: {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if not self.beta > 0:
            raise DomainError(f"smoothness must be positive, got {self.beta}")

    @property
    def eta(self) -> float:
        """Step size of the canonical NAG run the variant is equivalent to."""
        if self.kind is VariantKind.VARIANT2:
            return 1.0 / (2.0 * self.beta)
        return 1.0 / self.beta


@dataclass(frozen=True, eq=False)
class VariantTrajectory:
    """Native iterate sequences; row r of every array is step ``first_index + r``."""

    kind: VariantKind
    eta: float
    first_index: int
    sequences: Dict[str, np.ndarray] = field(default_factory=dict)

    def at(self, name: str, t: int) -> np.ndarray:
        return self.sequences[name][t - self.first_index]


def _run_variant1(f: Objective, start: np.ndarray, T: int, beta: float) -> Dict[str, np.ndarray]:
    shape = (T + 1, start.shape[0])
    xt, yt, zt = np.empty(shape), np.empty(shape), np.empty(shape)
    xt[0] = yt[0] = zt[0] = start
    for t in range(T):
        tau = 2.0 / (t + 2)
        alpha = (t + 2) / (2.0 * beta)
        xt[t + 1] = tau * zt[t] + (1.0 - tau) * yt[t]
        g = checked_gradient(f, xt[t + 1], t + 1)
        yt[t + 1] = xt[t + 1] - g / beta
        zt[t + 1] = zt[t] - alpha * g
    return {"x_tilde": xt, "y_tilde": yt, "z_tilde": zt}


def _run_variant2(f: Objective, start: np.ndarray, T: int, beta: float) -> Dict[str, np.ndarray]:
    # rows are steps 1..T+1
    shape = (T + 1, start.shape[0])
    xt, md, ag = np.empty(shape), np.empty(shape), np.empty(shape)
    xt[0] = ag[0] = start
    for r in range(T + 1):
        t = r + 1
        weight = 2.0 / (t + 1)
        md[r] = weight * xt[r] + (1.0 - weight) * ag[r]
        if r == T:
            break
        g = checked_gradient(f, md[r], t)
        xt[r + 1] = xt[r] - ((t + 1) / (4.0 * beta)) * g
        ag[r + 1] = weight * xt[r + 1] + (1.0 - weight) * ag[r]
    return {"x_tilde": xt, "x_md": md, "x_ag": ag}


def run_variant(cfg: VariantConfig, f: Objective, x0: PointLike, T: int) -> VariantTrajectory:
    if T < 0:
        raise DomainError(f"number of steps must be >= 0, got {T}")
    start = as_point(x0)
    if cfg.kind is VariantKind.VARIANT1:
        return VariantTrajectory(cfg.kind, cfg.eta, 0, _run_variant1(f, start, T, cfg.beta))
    if cfg.kind is VariantKind.VARIANT2:
        return VariantTrajectory(cfg.kind, cfg.eta, 1, _run_variant2(f, start, T, cfg.beta))
    traj = run_nag(f, start, T, cfg.eta)
    return VariantTrajectory(cfg.kind, cfg.eta, 0, {"x": traj.xs, "y": traj.ys, "m": traj.ms})


def check_variant_equivalence(
    kind: VariantKind, f: Objective, x0: PointLike, T: int, beta: Optional[float] = None
) -> float:
    """Max absolute deviation over the identities linking a variant to canonical NAG.

    variant1: x~_t = y_{t-1} and y~_t = x_t for 1 <= t <= T.
    variant2: x~ag_t = x_{t-1} and x~md_t = y_{t-1} for 1 <= t <= T + 1.
    """
    if beta is None:
        beta = f.smoothness
        if beta is None:
            raise DomainError(f"{f.name} declares no smoothness constant; pass beta")
        if beta == 0.0:
            # flat gradients are beta-smooth for every beta
            beta = FLAT_BETA
    cfg = VariantConfig(kind, beta)
    if cfg.kind is VariantKind.CANONICAL:
        raise DomainError("canonical NAG has no variant identities to check")
    variant = run_variant(cfg, f, x0, T)
    canonical = run_nag(f, x0, T, cfg.eta)
    if cfg.kind is VariantKind.VARIANT1:
        pairs = [
            (variant.sequences["x_tilde"][1:], canonical.ys[:-1]),
            (variant.sequences["y_tilde"][1:], canonical.xs[1:]),
        ]
    else:
        pairs = [
            (variant.sequences["x_ag"], canonical.xs),
            (variant.sequences["x_md"], canonical.ys),
        ]
    deviation = 0.0
    for native, reference in pairs:
        if native.size:
            deviation = max(deviation, float(np.max(np.abs(native - reference))))
    logger.debug(
        "%s vs canonical NAG over %d steps: max deviation %.3e", cfg.kind.value, T, deviation
    )
    return deviation
