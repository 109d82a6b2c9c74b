"""Canonical NAG, smooth GD and projected subgradient GD with full trajectory recording."""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.errors import DomainError, NumericError
from src.optim.objectives import Objective
from src.utils.numeric import PointLike, as_point

logger = logging.getLogger(__name__)


def momentum_coeff(t: int) -> float:
    """gamma_t = (t - 1) / (t + 2), so gamma_1 = 0."""
    if t < 1:
        raise DomainError(f"momentum coefficient needs t >= 1, got {t}")
    return (t - 1) / (t + 2)


@dataclass(frozen=True, eq=False)
class NagState:
    t: int
    x: np.ndarray
    y: np.ndarray
    m: np.ndarray

    def __str__(self):
        return f"NagState(t={self.t}, x={self.x}, y={self.y}, m={self.m})"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Rows 0..T of the x, y and m sequences of one run.

    ``averages`` holds the running means of x for projected subgradient runs.
    """

    xs: np.ndarray
    ys: np.ndarray
    ms: np.ndarray
    eta: float
    objective_id: str
    averages: Optional[np.ndarray] = None

    def __post_init__(self):
        for arr in (self.xs, self.ys, self.ms, self.averages):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def steps(self) -> int:
        return self.xs.shape[0] - 1

    def state(self, t: int) -> NagState:
        return NagState(t=t, x=self.xs[t], y=self.ys[t], m=self.ms[t])

    @property
    def states(self) -> List[NagState]:
        return [self.state(t) for t in range(self.steps + 1)]

    def __len__(self) -> int:
        return self.xs.shape[0]


def checked_gradient(
    f: Objective, point: np.ndarray, step: int, subgradient: bool = False
) -> np.ndarray:
    g = f.subgradient_at(point) if subgradient else f.gradient_at(point)
    g = np.asarray(g, dtype=float)
    if not np.all(np.isfinite(g)):
        raise NumericError(
            f"Non-finite gradient of {f.name} at step {step}: {g}", point=point, step=step
        )
    return g


def _check_eta(eta: float):
    if not eta > 0:
        raise DomainError(f"step size must be positive, got {eta}")


def nag_step(state: NagState, f: Objective, eta: float) -> NagState:
    """One NAG update; y is formed as x + m from the freshly computed pair."""
    _check_eta(eta)
    if state.t < 0:
        raise DomainError(f"step index must be >= 0, got {state.t}")
    t = state.t + 1
    step = eta * checked_gradient(f, state.y, t)
    x = state.y - step
    m = momentum_coeff(t) * (state.m - step)
    return NagState(t=t, x=x, y=x + m, m=m)


def _init_arrays(x0: PointLike, T: int):
    if T < 0:
        raise DomainError(f"number of steps must be >= 0, got {T}")
    start = as_point(x0)
    shape = (T + 1, start.shape[0])
    xs = np.empty(shape)
    xs[0] = start
    return start, xs


def run_nag(f: Objective, x0: PointLike, T: int, eta: float) -> Trajectory:
    _check_eta(eta)
    start, xs = _init_arrays(x0, T)
    ys = np.empty_like(xs)
    ms = np.zeros_like(xs)
    ys[0] = start
    state = NagState(t=0, x=start, y=start, m=ms[0].copy())
    for _ in range(T):
        state = nag_step(state, f, eta)
        xs[state.t] = state.x
        ys[state.t] = state.y
        ms[state.t] = state.m
    logger.debug("NAG on %s: %d steps, eta=%g", f.name, T, eta)
    return Trajectory(xs=xs, ys=ys, ms=ms, eta=eta, objective_id=repr(f))


def run_gd(f: Objective, x0: PointLike, T: int, eta: float) -> Trajectory:
    _check_eta(eta)
    _, xs = _init_arrays(x0, T)
    for t in range(T):
        xs[t + 1] = xs[t] - eta * checked_gradient(f, xs[t], t + 1)
    return Trajectory(xs=xs, ys=xs.copy(), ms=np.zeros_like(xs), eta=eta, objective_id=repr(f))


def project_to_ball(x: np.ndarray, radius: float) -> np.ndarray:
    length = float(np.linalg.norm(x))
    if length <= radius:
        return x
    return x * (radius / length)


def run_projected_subgd(
    f: Objective, x0: PointLike, T: int, eta: float, radius: float
) -> Trajectory:
    """Subgradient steps projected onto the centred Euclidean ball of ``radius``."""
    _check_eta(eta)
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    start, xs = _init_arrays(x0, T)
    if float(np.linalg.norm(start)) > radius * (1.0 + 1e-12):
        raise DomainError(f"start point norm {np.linalg.norm(start):.6g} exceeds radius {radius}")
    averages = np.empty_like(xs)
    averages[0] = start
    running = start.copy()
    for t in range(T):
        g = checked_gradient(f, xs[t], t + 1, subgradient=True)
        xs[t + 1] = project_to_ball(xs[t] - eta * g, radius)
        running = running + xs[t + 1]
        averages[t + 1] = running / (t + 2)
    return Trajectory(
        xs=xs, ys=xs.copy(), ms=np.zeros_like(xs), eta=eta, objective_id=repr(f), averages=averages
    )
