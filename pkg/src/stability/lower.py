"""Verifiers for the exponential divergence of NAG on the hard construction."""

import logging
from typing import Optional, Tuple

import numpy as np

from src.errors import DomainError
from src.hardfn.construction import ConstructionResult, floor_horizon
from src.stability.divergence import divergence_series
from src.stability.report import DivergenceReport, lower_curve
from src.utils.checks import IDENTITY_TOL, CheckReport
from src.utils.numeric import pow3

logger = logging.getLogger(__name__)

# gradient-difference tolerance, relative to beta |dy| + G
DICHOTOMY_TOL = 1e-12


def evolution_horizon(cr: ConstructionResult) -> int:
    return max(floor_horizon(cr.params), cr.checkpoints[-1]) + 5 * cr.checkpoints[0]


def default_horizon(cr: ConstructionResult) -> int:
    return max(floor_horizon(cr.params) + cr.checkpoints[0], cr.checkpoints[-1])


def construction_series(
    cr: ConstructionResult, horizon: int, plateau: bool = True
) -> DivergenceReport:
    """Runs from 0 and eps on f_M^+ (or on f_M when ``plateau`` is False)."""
    p = cr.params
    f = cr.f_M_plus if plateau else cr.f_M
    return divergence_series(
        f, 0.0, p.eps, horizon, p.eta, beta=p.beta, G=p.G, checkpoints=cr.checkpoints
    )


def verify_evolution(cr: ConstructionResult, strict: bool = True) -> CheckReport:
    """Phase-by-phase growth of the divergence on f_M.

    (i)   (2/3) eta beta |dy_{n_j}| <= |dm_{n_j+1}| <= (1/5) eta beta |dy_{n_{j+1}}|
    (ii)  |dy_{n_{j+1}}| >= 3^j eps
    (iii) |dy_t| >= |dy_{n_{M+1}}| for every t past n_{M+1} up to the horizon
    plus the gradient-difference dichotomy and the floor G/(3 beta) at n_{M+1}.
    """
    p = cr.params
    report = CheckReport()
    horizon = evolution_horizon(cr)
    series = construction_series(cr, horizon, plateau=False)
    report.extend(series.checks)
    dy = series.signed("dy")
    dm = series.signed("dm")
    allowance = series.allowances()
    n = cr.checkpoints
    eb = p.eta * p.beta

    for j in range(1, cr.M + 1):
        n_j, n_next = n[j - 1], n[j]
        report.at_least(
            "evolution.momentum_lower",
            abs(dm[n_j + 1]),
            (2.0 / 3.0) * eb * abs(dy[n_j]),
            allowance=allowance[n_next],
            phase=j,
        )
        report.at_most(
            "evolution.momentum_upper",
            abs(dm[n_j + 1]),
            0.2 * eb * abs(dy[n_next]),
            allowance=allowance[n_next],
            phase=j,
        )
    for j in range(0, cr.M + 1):
        report.at_least(
            "evolution.growth",
            abs(dy[n[j]]),
            pow3(j) * p.eps,
            allowance=allowance[n[j]],
            phase=j,
        )

    if cr.M >= 1:
        n_last = n[cr.M]
        reached = abs(dy[n_last])
        report.at_least("evolution.floor", reached, p.floor, phase=cr.M + 1)
        after = np.abs(dy[n_last + 1 :])
        if after.size:
            worst = int(np.argmin(after))
            report.at_least(
                "evolution.persistence",
                float(after[worst]),
                reached,
                allowance=allowance[horizon],
                t=n_last + 1 + worst,
            )

    # beta dy at the first M checkpoints, zero elsewhere
    dgrad = series.signed("dgrad")
    expected = np.zeros_like(dgrad)
    for n_j in n[: cr.M]:
        expected[n_j] = p.beta * dy[n_j]
    limit = DICHOTOMY_TOL * (p.beta * np.abs(dy) + p.G)
    excess = np.abs(dgrad - expected) - limit
    worst = int(np.argmax(excess))
    report.add(
        "evolution.dichotomy",
        bool(excess[worst] <= 0.0),
        abs(dgrad[worst] - expected[worst]),
        limit[worst],
        t=worst,
    )
    logger.info("Evolution checks over %d steps: %s", horizon, report.summary().splitlines()[0])
    if strict:
        report.raise_for_failures()
    return report


def _checkpoints_upto(cr: ConstructionResult, horizon: int):
    i = 1
    while cr.params.checkpoint(i) <= horizon:
        yield i, cr.params.checkpoint(i)
        i += 1


def verify_exponential_divergence(
    cr: ConstructionResult, horizon: Optional[int] = None, strict: bool = True
) -> DivergenceReport:
    """|x_t - x~_t| on f_M^+ against min{G/(3 beta), c2 exp(c1 eta beta t) eps}.

    Checked with no slack at every checkpoint n_i <= horizon; the floor alone is checked
    at every step past the floor horizon. The differences on f_M^+ must match those on
    f_M step for step, and once the floor is reached it must persist for 5 n_1 steps.
    The returned series carries all records in ``checks``.
    """
    p = cr.params
    if horizon is None:
        horizon = default_horizon(cr)
    if horizon < cr.checkpoints[-1]:
        raise DomainError(f"horizon {horizon} is before n_(M+1) = {cr.checkpoints[-1]}")
    series = construction_series(cr, horizon)
    report = series.checks
    dx = series.magnitude("dx")
    floor = p.floor

    for i, t in _checkpoints_upto(cr, horizon):
        required = min(floor, float(lower_curve(t, p.eps, p.eta, p.beta)))
        report.at_least("divergence.checkpoint", float(dx[t]), required, slack=0.0, t=t, phase=i)

    start = floor_horizon(p) + 1
    if start <= horizon:
        tail = dx[start:]
        worst = int(np.argmin(tail))
        report.at_least("divergence.floor", float(tail[worst]), floor, t=start + worst)

    plain = construction_series(cr, horizon, plateau=False)
    signed, signed_plain = series.signed("dx"), plain.signed("dx")
    difference = np.abs(signed - signed_plain)
    scale = np.maximum(np.maximum(np.abs(signed), np.abs(signed_plain)), p.eps)
    limit = IDENTITY_TOL * scale + np.maximum(series.allowances(), plain.allowances())
    worst = int(np.argmax(difference - limit))
    report.add(
        "divergence.plateau_identity",
        bool(difference[worst] <= limit[worst]),
        float(difference[worst]),
        float(limit[worst]),
        t=worst,
    )

    dy = series.magnitude("dy")
    above = np.nonzero(dy >= floor)[0]
    if above.size:
        first = int(above[0])
        window = dy[first : min(first + 5 * cr.checkpoints[0], horizon) + 1]
        report.at_least(
            "divergence.persistence",
            float(np.min(window)),
            floor * (1.0 - IDENTITY_TOL),
            slack=0.0,
            t=first,
        )
    logger.info(
        "Exponential divergence checks to t=%d: %s", horizon, report.summary().splitlines()[0]
    )
    if strict:
        report.raise_for_failures()
    return series


def check_sandwich(cr: ConstructionResult, series: DivergenceReport) -> CheckReport:
    """lower curve <= |dx| <= eps + eta beta eps 3^(t-1) at every checkpoint in the series."""
    p = cr.params
    report = CheckReport()
    dx = series.magnitude("dx")
    for _, t in _checkpoints_upto(cr, series.steps):
        lower = min(p.floor, float(lower_curve(t, p.eps, p.eta, p.beta)))
        upper = p.eps + p.eta * p.beta * p.eps * pow3(t - 1)
        report.at_least("sandwich.lower", float(dx[t]), lower, slack=0.0, t=t)
        report.at_most("sandwich.upper", float(dx[t]), upper, t=t)
    return report


def sign_alternations(cr: ConstructionResult, series: DivergenceReport) -> Tuple[int, int]:
    """Sign changes of dx between consecutive checkpoints n_1..n_{M+1}, out of the transitions."""
    dx = series.signed("dx")
    signs = [np.sign(dx[n]) for n in cr.checkpoints if n <= series.steps]
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)
    logger.info("dx changed sign %d times over %d phase transitions", changes, len(signs) - 1)
    return changes, max(len(signs) - 1, 0)
