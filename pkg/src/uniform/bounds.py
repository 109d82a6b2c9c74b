"""Uniform stability of full-batch NAG: the reduction, the exponential gap and the linear case."""

import logging
import math
from typing import Iterator, Optional, Tuple

import numpy as np

from src.errors import DomainError
from src.optim.nag import Trajectory, run_nag
from src.optim.objectives import (
    HuberObjective,
    LinearObjective,
    Objective,
    WeightedSum,
    sample_regularity,
)
from src.stability.lower import construction_series
from src.stability.report import C1, C2
from src.uniform.losses import SYMBOLS, ReductionScenario
from src.utils.checks import IDENTITY_TOL, CheckReport
from src.utils.numeric import DBL_EPS, pow3, relative_deviation, rounding_allowance, safe_exp
from src.utils.random_utils import make_rng

logger = logging.getLogger(__name__)

C3 = C1 / 4.0
C4 = C2 / 4.0

# closed-form agreement for the linear-loss example
CLOSED_FORM_TOL = 1e-10
MOMENTUM_LAW_TOL = 1e-12


def uniform_floor_horizon(hat_eta: float, hat_beta: float, n: int) -> int:
    """Largest integer at or below ceil(40/(eta^ beta^)) (ln(6n/(eta^ beta^)^2) + 3)."""
    product = hat_eta * hat_beta
    if not product > 0:
        raise DomainError(f"eta^ * beta^ must be positive, got {product}")
    block = math.ceil(40.0 / product)
    return math.floor(block * (math.log(6.0 * n / (product * product)) + 3.0))


def uniform_lower_bound(hat_G: float, hat_beta: float, hat_eta: float, n: int, T: int) -> float:
    """min{G^2/(3 beta^), c4 exp(c3 eta^ beta^ T) beta^ eta^2 G^2 / n}."""
    floor = hat_G * hat_G / (3.0 * hat_beta)
    growth = safe_exp(C3 * hat_eta * hat_beta * T)
    return min(floor, C4 * growth * hat_beta * hat_eta * hat_eta * hat_G * hat_G / n)


def _scenario_bound(sc: ReductionScenario, T: int) -> float:
    f = sc.family
    return uniform_lower_bound(f.hat_G, f.hat_beta, f.hat_eta, sc.n, T)


def uniform_checkpoints(sc: ReductionScenario, horizon: int) -> Iterator[Tuple[int, int]]:
    """Checkpoints ceil(10 n / (eta^ beta (n - 3))) (i + 2), which are the construction's n_i."""
    i = 1
    while sc.params.checkpoint(i) <= horizon:
        yield i, sc.params.checkpoint(i)
        i += 1


def risk_runs(sc: ReductionScenario, T: int) -> Tuple[Trajectory, Trajectory]:
    """Full-batch NAG from 0 with step eta^ on R_S and on R_S'."""
    if T < 1:
        raise DomainError(f"need T >= 1, got {T}")
    return run_nag(sc.R_S, 0.0, T, sc.hat_eta), run_nag(sc.R_S_prime, 0.0, T, sc.hat_eta)


def _max_deviation(u: Trajectory, v: Trajectory) -> Tuple[float, int]:
    worst, at = 0.0, 0
    for t in range(1, u.steps + 1):
        for a, b in ((u.xs[t, 0], v.xs[t, 0]), (u.ys[t, 0], v.ys[t, 0])):
            dev = relative_deviation(float(a), float(b), 1.0)
            if dev > worst:
                worst, at = dev, t
    return worst, at


def verify_reduction(sc: ReductionScenario, T: int, strict: bool = True) -> float:
    """NAG on f_M^+ with step eta matches NAG on the empirical risks with step eta^.

    From 0 on f_M^+ against R_S, and from eps on f_M^+ against R_S' started at 0. Returns
    the largest relative deviation over x and y, scale 1.
    """
    if T < 1:
        raise DomainError(f"reduction check needs T >= 1, got {T}")
    p = sc.params
    f = sc.construction.f_M_plus
    run_S, run_S_prime = risk_runs(sc, T)
    pairs = {
        "reduction.from_zero": (run_nag(f, 0.0, T, p.eta), run_S),
        "reduction.from_eps": (run_nag(f, p.eps, T, p.eta), run_S_prime),
    }
    report = CheckReport()
    worst = 0.0
    for name, (direct, via_risk) in pairs.items():
        dev, t = _max_deviation(direct, via_risk)
        report.close(name, dev, 1.0, tol=IDENTITY_TOL, t=t)
        worst = max(worst, dev)

    # l(.;2) is flat from eta G on, and every later y of the S' run lies there
    g2 = sc.family.g2
    active = [t for t in range(1, T) if g2.grad(float(run_S_prime.ys[t, 0])) != 0.0]
    report.add(
        "reduction.g2_inactive",
        not active,
        len(active),
        0,
        first=active[0] if active else None,
    )
    logger.info("Reduction over %d steps: max relative deviation %.3g", T, worst)
    if strict:
        report.raise_for_failures()
    return worst


def uniform_gap(sc: ReductionScenario, T: int, strict: bool = True) -> float:
    """G |x_T - x~_T| for NAG on R_S and R_S' from 0 with step eta^.

    Checked against the exponential lower bound when T is a checkpoint, and against the
    floor G^2/(3 beta) when T is past the floor horizon.
    """
    run_S, run_S_prime = risk_runs(sc, T)
    G = sc.params.G
    gap = G * abs(float(run_S.xs[T, 0] - run_S_prime.xs[T, 0]))
    report = CheckReport()
    if any(t == T for _, t in uniform_checkpoints(sc, T)):
        report.at_least("uniform.checkpoint", gap, _scenario_bound(sc, T), T=T)
    f = sc.family
    if T > uniform_floor_horizon(f.hat_eta, f.hat_beta, sc.n):
        report.at_least("uniform.floor", gap, f.hat_G * f.hat_G / (3.0 * f.hat_beta), T=T)
    if strict:
        report.raise_for_failures()
    return gap


def verify_uniform_lower_bound(
    sc: ReductionScenario, horizon: Optional[int] = None, strict: bool = True
) -> CheckReport:
    """Every checkpoint and every step past the floor horizon, from a single pair of runs.

    Also ties the gap to G times the divergence of the f_M^+ runs from 0 and eps.
    """
    f = sc.family
    floor_h = uniform_floor_horizon(f.hat_eta, f.hat_beta, sc.n)
    if horizon is None:
        horizon = max(floor_h + 1, sc.construction.checkpoints[-1])
    run_S, run_S_prime = risk_runs(sc, horizon)
    G = sc.params.G
    gaps = G * np.abs(run_S.xs[:, 0] - run_S_prime.xs[:, 0])
    report = CheckReport()
    for i, t in uniform_checkpoints(sc, horizon):
        report.at_least("uniform.checkpoint", float(gaps[t]), _scenario_bound(sc, t), t=t, phase=i)
    if floor_h + 1 <= horizon:
        tail = gaps[floor_h + 1 :]
        worst = int(np.argmin(tail))
        report.at_least(
            "uniform.floor",
            float(tail[worst]),
            f.hat_G * f.hat_G / (3.0 * f.hat_beta),
            t=floor_h + 1 + worst,
        )

    series = construction_series(sc.construction, horizon)
    expected = G * series.magnitude("dx")
    scale = np.maximum(np.maximum(gaps, expected), G * sc.params.eps)
    limit = IDENTITY_TOL * scale + G * series.allowances()
    difference = np.abs(gaps - expected)
    worst = int(np.argmax(difference - limit))
    report.add(
        "uniform.gap_identity",
        bool(difference[worst] <= limit[worst]),
        float(difference[worst]),
        float(limit[worst]),
        t=worst,
    )
    logger.info("Uniform lower bound to t=%d: %s", horizon, report.summary().splitlines()[0])
    if strict:
        report.raise_for_failures()
    return report


def check_loss_regularity(
    sc: ReductionScenario, T: Optional[int] = None, pairs: int = 2_000, seed: int = 0
) -> CheckReport:
    """Sampled G-Lipschitz and beta-smoothness of every loss over the range the runs traverse."""
    p = sc.params
    if T is None:
        T = sc.construction.checkpoints[-1]
    run_S, run_S_prime = risk_runs(sc, T)
    points = np.concatenate([run_S.ys[:, 0], run_S_prime.ys[:, 0]])
    low, high = min(float(points.min()), 0.0), float(points.max())
    noise = 8.0 * DBL_EPS * (p.G + p.beta * max(abs(low), abs(high)))
    report = CheckReport()
    for z in SYMBOLS:
        max_grad, max_ratio = sample_regularity(
            sc.family.loss(z), low, high, pairs, make_rng(seed, z), noise=noise
        )
        report.at_most("losses.lipschitz", max_grad, p.G, symbol=z)
        report.at_most("losses.smoothness", max_ratio, p.beta, symbol=z)
    return report


def derived_quadratic_gap(G: float, eta: float, n: int, T: int) -> float:
    """G eta (T^2 + 5T + 2) / (4n), the unrolled |dx_T| of the linear-loss pair."""
    return G * eta * (T * T + 5 * T + 2) / (4.0 * n)


def stated_quadratic_gap(G: float, eta: float, n: int, T: int) -> float:
    """3 G eta T (T + 2) / (4n); within a factor of three of the unrolled gap."""
    return 3.0 * G * eta * T * (T + 2) / (4.0 * n)


def quadratic_linear_lower(
    G: float, eta: float, n: int, T: int, strict: bool = True
) -> Tuple[float, float]:
    """NAG on R_S(w) = G w and R_S'(w) = ((n - 2)/n) G w from 0.

    Returns the unrolled closed form of |dx_T| and the simulated value. Checks their
    agreement, the envelope stated/3 <= simulated <= (8/9) stated, and the momentum law
    dm_t = ((t - 1)/4)(2 G eta / n) at every t <= T.
    """
    if n < 2 or T < 1:
        raise DomainError(f"need n >= 2 and T >= 1, got n={n}, T={T}")
    if not G > 0 or not eta > 0:
        raise DomainError(f"G and eta must be positive, got G={G}, eta={eta}")
    run = run_nag(LinearObjective(G), 0.0, T, eta)
    run_prime = run_nag(LinearObjective((n - 2) / n * G), 0.0, T, eta)
    dx = np.abs(run.xs[:, 0] - run_prime.xs[:, 0])
    dm = np.abs(run.ms[:, 0] - run_prime.ms[:, 0])
    closed_form = derived_quadratic_gap(G, eta, n, T)
    simulated = float(dx[T])

    report = CheckReport()
    scale = max(abs(float(run.xs[T, 0])), abs(float(run_prime.xs[T, 0])))
    report.close(
        "linear.closed_form",
        abs(simulated - closed_form),
        closed_form,
        tol=CLOSED_FORM_TOL,
        allowance=rounding_allowance(scale, T),
        T=T,
    )
    stated = stated_quadratic_gap(G, eta, n, T)
    report.at_least("linear.envelope_lower", simulated, stated / 3.0, T=T)
    report.at_most("linear.envelope_upper", simulated, stated * 8.0 / 9.0, T=T)

    step = 2.0 * G * eta / n
    law = np.array([(t - 1) / 4.0 * step for t in range(1, T + 1)])
    magnitudes = np.maximum(np.abs(run.ms[1:, 0]), np.abs(run_prime.ms[1:, 0]))
    deviation = np.abs(dm[1:] - law)
    limit = MOMENTUM_LAW_TOL * law + 4.0 * DBL_EPS * np.arange(1, T + 1) * magnitudes
    worst = int(np.argmax(deviation - limit))
    report.add(
        "linear.momentum_law",
        bool(deviation[worst] <= limit[worst]),
        float(deviation[worst]),
        float(limit[worst]),
        t=worst + 1,
    )
    if strict:
        report.raise_for_failures()
    return closed_form, simulated


def nag_uniform_upper_report(
    risk: Objective, risk_prime: Objective, G: float, n: int, T: int, eta: float
) -> CheckReport:
    """G |dx_t| <= (2 eta G^2 / n)(3^(t-1) + 1) at every 1 <= t <= T, both runs from 0."""
    if T < 1:
        raise DomainError(f"uniform upper bound needs T >= 1, got {T}")
    run = run_nag(risk, 0.0, T, eta)
    run_prime = run_nag(risk_prime, 0.0, T, eta)
    gaps = G * np.linalg.norm(run.xs - run_prime.xs, axis=1)
    scale = np.maximum(np.max(np.abs(run.ys), axis=1), np.max(np.abs(run_prime.ys), axis=1))
    report = CheckReport()
    worst_t, worst_excess = 1, -math.inf
    for t in range(1, T + 1):
        bound = 2.0 * eta * G * G / n * (pow3(t - 1) + 1.0)
        excess = gaps[t] - bound * (1.0 + IDENTITY_TOL) - G * rounding_allowance(scale[t], t)
        if excess > worst_excess:
            worst_t, worst_excess = t, excess
    bound = 2.0 * eta * G * G / n * (pow3(worst_t - 1) + 1.0)
    report.at_most(
        "uniform.upper",
        float(gaps[worst_t]),
        bound,
        slack=IDENTITY_TOL,
        allowance=G * rounding_allowance(scale[worst_t], worst_t),
        t=worst_t,
    )
    return report


def check_nag_uniform_upper(
    risk: Objective,
    risk_prime: Objective,
    G: float,
    n: int,
    T: int,
    eta: float,
    strict: bool = True,
) -> bool:
    report = nag_uniform_upper_report(risk, risk_prime, G, n, T, eta)
    if strict:
        report.raise_for_failures()
    return report.passed


def random_huber_scenario(
    rng: np.random.Generator, n: int, G: float, beta: float, spread: float = 1.0
) -> Tuple[WeightedSum, WeightedSum]:
    """Empirical risks of two Huber samples of size n that differ in their first example."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    centers = rng.uniform(-spread, spread, size=n + 1)
    losses = [HuberObjective(c, G, beta) for c in centers]
    shared = losses[1:n]
    risk = WeightedSum([(1.0 / n, loss) for loss in [losses[0]] + shared])
    risk_prime = WeightedSum([(1.0 / n, loss) for loss in [losses[n]] + shared])
    return risk, risk_prime
