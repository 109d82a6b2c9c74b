"""Difference sequences between NAG runs from two starting points."""

import logging
from typing import Optional, Sequence

import numpy as np

from src.errors import DomainError
from src.optim.nag import Trajectory, momentum_coeff, run_nag
from src.optim.objectives import Objective
from src.stability.report import DivergenceReport
from src.utils.checks import CheckReport
from src.utils.numeric import DBL_EPS, PointLike, as_point

logger = logging.getLogger(__name__)

# rounding budget per recurrence residual, in units of DBL_EPS times operand size
RECURRENCE_ULPS = 8.0


def _gradients(f: Objective, run: Trajectory) -> np.ndarray:
    return np.array([f.gradient_at(y) for y in run.ys])


def _closure(
    report: CheckReport, name: str, residual: np.ndarray, scale: np.ndarray
) -> None:
    limit = RECURRENCE_ULPS * DBL_EPS * scale
    excess = residual - limit
    worst = int(np.argmax(np.max(excess, axis=1))) if excess.size else 0
    passed = bool(np.all(excess <= 0.0))
    observed = float(np.max(residual[worst])) if residual.size else 0.0
    required = float(np.max(limit[worst])) if limit.size else 0.0
    report.add(name, passed, observed, required, t=worst + 1)


def check_recurrences(
    run: Trajectory, run_tilde: Trajectory, g: np.ndarray, g_tilde: np.ndarray, eta: float
) -> CheckReport:
    """Residuals of the difference recurrences, relative to the size of their operands.

        dx_t = dy_{t-1} - eta dgrad_{t-1}
        dm_t = gamma_t (dm_{t-1} - eta dgrad_{t-1})
        dy_t = dx_t + dm_t
    """
    report = CheckReport()
    T = run.steps
    if T < 1:
        return report
    dx = run.xs - run_tilde.xs
    dy = run.ys - run_tilde.ys
    dm = run.ms - run_tilde.ms
    dg = g - g_tilde
    gammas = np.array([momentum_coeff(t) for t in range(1, T + 1)])[:, None]
    eg = eta * (np.abs(g[:-1]) + np.abs(g_tilde[:-1]))

    residual = np.abs(dx[1:] - (dy[:-1] - eta * dg[:-1]))
    scale = np.abs(run.xs[1:]) + np.abs(run_tilde.xs[1:]) + np.abs(run.ys[:-1])
    scale = scale + np.abs(run_tilde.ys[:-1]) + eg
    _closure(report, "divergence.recurrence_x", residual, scale)

    residual = np.abs(dm[1:] - gammas * (dm[:-1] - eta * dg[:-1]))
    scale = np.abs(run.ms[1:]) + np.abs(run_tilde.ms[1:]) + np.abs(run.ms[:-1])
    scale = scale + np.abs(run_tilde.ms[:-1]) + eg
    _closure(report, "divergence.recurrence_m", residual, scale)

    residual = np.abs(dy[1:] - (dx[1:] + dm[1:]))
    scale = np.abs(run.ys[1:]) + np.abs(run_tilde.ys[1:]) + np.abs(run.xs[1:])
    scale = scale + np.abs(run_tilde.xs[1:]) + np.abs(run.ms[1:]) + np.abs(run_tilde.ms[1:])
    _closure(report, "divergence.recurrence_y", residual, scale)
    return report


def divergence_series(
    f: Objective,
    x0: PointLike,
    x0_tilde: PointLike,
    T: int,
    eta: float,
    beta: Optional[float] = None,
    G: Optional[float] = None,
    checkpoints: Sequence[int] = (),
) -> DivergenceReport:
    """Run NAG from ``x0`` and ``x0_tilde`` and record all four difference sequences.

    ``beta`` and ``G`` only feed the reference curves of the report.
    """
    if T < 1:
        raise DomainError(f"divergence series needs T >= 1, got {T}")
    start, start_tilde = as_point(x0), as_point(x0_tilde)
    if start.shape != start_tilde.shape:
        raise DomainError(f"start points differ in shape: {start.shape} vs {start_tilde.shape}")
    run = run_nag(f, start, T, eta)
    run_tilde = run_nag(f, start_tilde, T, eta)
    g, g_tilde = _gradients(f, run), _gradients(f, run_tilde)
    checks = check_recurrences(run, run_tilde, g, g_tilde, eta)
    if beta is None:
        beta = f.smoothness if f.smoothness else None
    report = DivergenceReport(
        dx=run.xs - run_tilde.xs,
        dy=run.ys - run_tilde.ys,
        dm=run.ms - run_tilde.ms,
        dgrad=g - g_tilde,
        eps=float(np.linalg.norm(start - start_tilde)),
        eta=eta,
        beta=beta,
        G=G,
        checkpoints=tuple(checkpoints),
        checks=checks,
        position_scale=np.maximum(
            np.max(np.abs(run.ys), axis=1), np.max(np.abs(run_tilde.ys), axis=1)
        ),
    )
    logger.debug(
        "Divergence on %s over %d steps: final |dx|=%.6g", f.name, T, report.magnitude("dx")[-1]
    )
    return report
