"""Upper bounds on initialization stability: GD (smooth and non-smooth) and NAG."""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from src.errors import DomainError
from src.hardfn.construction import ConstructionResult
from src.optim.nag import run_gd, run_projected_subgd
from src.optim.objectives import MaxAffineObjective, Objective, QuadraticObjective
from src.stability.divergence import divergence_series
from src.utils.checks import INEQUALITY_SLACK, CheckReport
from src.utils.numeric import PointLike, as_point, pow3, rounding_allowance
from src.utils.random_utils import make_rng, random_unit_vector

logger = logging.getLogger(__name__)

# relative slack of the exponential NAG bounds
EXPONENTIAL_SLACK = 1e-9


def _directions(rng: np.random.Generator, d: int, count: int) -> np.ndarray:
    if d == 1:
        return np.array([[1.0], [-1.0]])
    return np.array([random_unit_vector(rng, d) for _ in range(count)])


def check_gd_smooth_upper(
    f: Objective,
    x0: PointLike,
    eps: float,
    T: int,
    eta: float,
    directions: int = 8,
    seed: int = 0,
    strict: bool = True,
) -> float:
    """Largest ||x_t - x~_t|| of GD over starts x~_0 on the eps-sphere around x0.

    Every run must stay within eps (1 + 1e-12), plus the rounding of its own magnitudes.
    """
    beta = f.smoothness
    if beta is None:
        raise DomainError(f"{f.name} is not declared smooth")
    if beta > 0 and eta > 2.0 / beta * (1.0 + INEQUALITY_SLACK):
        raise DomainError(f"GD bound needs eta <= 2/beta = {2.0 / beta!r}, got {eta!r}")
    start = as_point(x0)
    report = CheckReport()
    base = run_gd(f, start, T, eta)
    worst = 0.0
    for k, u in enumerate(_directions(make_rng(seed), start.shape[0], directions)):
        other = run_gd(f, start + eps * u, T, eta)
        gaps = np.linalg.norm(base.xs - other.xs, axis=1)
        scale = max(float(np.max(np.abs(base.xs))), float(np.max(np.abs(other.xs))))
        report.at_most(
            "gd_smooth.upper",
            float(np.max(gaps)),
            eps,
            allowance=rounding_allowance(scale, T),
            direction=k,
        )
        worst = max(worst, float(np.max(gaps)))
    if strict:
        report.raise_for_failures()
    return worst


def check_gd_nonsmooth(
    eps: float,
    G: float,
    eta: float,
    T: int,
    d: int,
    radius: Optional[float] = None,
    seeds: int = 20,
    strict: bool = True,
) -> Tuple[bool, float]:
    """Projected subgradient GD on G max{0, x_1 - c, ..., x_d - c} with c = eps / (2 sqrt d).

    Upper: divergence <= eps + 2 G eta sqrt(T) for final and averaged iterates, on the
    lower-bound pair and on ``seeds`` random pairs. Lower: from 0 and (eps/sqrt d) 1 the
    subgradients cycle through G e_1, ..., G e_d and the divergence at t <= d is at least
    0.5 G eta sqrt(t). Returns the upper verdict and the divergence at t = min(d, T).
    """
    if d < 1 or T < 0:
        raise DomainError(f"need d >= 1 and T >= 0, got d={d}, T={T}")
    root_d = math.sqrt(d)
    f = MaxAffineObjective(G, eps / (2.0 * root_d), d)
    if radius is None:
        radius = max(1.0, 2.0 * (eps + G * eta * math.sqrt(max(T, d))))
    bound = eps + 2.0 * G * eta * math.sqrt(T)
    upper = CheckReport()
    lower = CheckReport()

    x0 = np.zeros(d)
    x0_tilde = np.full(d, eps / root_d)
    pairs = [(x0, x0_tilde)]
    for s in range(seeds):
        rng = make_rng(s, d)
        start = random_unit_vector(rng, d) * rng.uniform(0.0, 0.5 * radius)
        pairs.append((start, start + eps * random_unit_vector(rng, d)))

    runs = []
    for k, (a, b) in enumerate(pairs):
        run = run_projected_subgd(f, a, T, eta, radius)
        run_tilde = run_projected_subgd(f, b, T, eta, radius)
        runs.append((run, run_tilde))
        iterates = (("final", run.xs, run_tilde.xs), ("average", run.averages, run_tilde.averages))
        for label, u, v in iterates:
            gaps = np.linalg.norm(u - v, axis=1)
            upper.at_most(
                "gd_nonsmooth.upper",
                float(np.max(gaps)),
                bound,
                allowance=rounding_allowance(radius, T),
                pair=k,
                iterate=label,
            )

    run, run_tilde = runs[0]
    horizon = min(d, T)
    for t in range(1, horizon + 1):
        active = f.active_coordinate(run_tilde.xs[t - 1])
        observed = -1 if active is None else active
        lower.add("gd_nonsmooth.schedule", active == t - 1, observed, t - 1, t=t)
        gap = float(np.linalg.norm(run.xs[t] - run_tilde.xs[t]))
        lower.at_least("gd_nonsmooth.lower", gap, 0.5 * G * eta * math.sqrt(t), t=t)
    witness = float(np.linalg.norm(run.xs[horizon] - run_tilde.xs[horizon]))
    logger.info(
        "Non-smooth GD (d=%d, T=%d): upper %s, witness %.6g",
        d,
        T,
        "pass" if upper.passed else "FAIL",
        witness,
    )
    if strict:
        upper.raise_for_failures()
        lower.raise_for_failures()
    return upper.passed and lower.passed, witness


def nag_convex_upper_report(
    f: Objective, x0: PointLike, eps: float, T: int, eta: float, beta: float
) -> CheckReport:
    """|dx_t| <= eps + eta beta eps 3^(t-1) for 1 <= t <= T, starts x0 and x0 + eps.

    One record for the step closest to (or furthest past) its bound.
    """
    if T < 1:
        raise DomainError(f"NAG convex bound needs T >= 1, got {T}")
    start = as_point(x0)
    series = divergence_series(f, start, start + eps, T, eta, beta=beta)
    dx = series.magnitude("dx")[1:]
    allowance = series.allowances()[1:]
    bounds = np.array([eps + eta * beta * eps * pow3(t - 1) for t in range(1, T + 1)])
    with np.errstate(invalid="ignore"):
        excess = dx - (bounds * (1.0 + EXPONENTIAL_SLACK) + allowance)
    worst = int(np.nanargmax(excess)) if np.isfinite(excess).any() else 0
    report = CheckReport()
    report.at_most(
        "nag_convex.upper",
        float(dx[worst]),
        float(bounds[worst]),
        slack=EXPONENTIAL_SLACK,
        allowance=float(allowance[worst]),
        t=worst + 1,
    )
    return report


def check_nag_convex_upper(cr: ConstructionResult, T: int, strict: bool = True) -> bool:
    p = cr.params
    report = nag_convex_upper_report(cr.f_M_plus, 0.0, p.eps, T, p.eta, p.beta)
    if strict:
        report.raise_for_failures()
    return report.passed


def check_nag_quadratic_upper(
    H: np.ndarray,
    x0: PointLike,
    eps: float,
    T: int,
    eta: float,
    linear: Optional[PointLike] = None,
    directions: int = 4,
    seed: int = 0,
    strict: bool = True,
) -> float:
    """Largest ||dx_t|| / (4 t eps) of NAG on x^T H x / 2 + b^T x; each must be <= 1."""
    f = QuadraticObjective(H, linear)
    beta = f.smoothness
    if beta > 0 and eta * beta > 1.0 + INEQUALITY_SLACK:
        raise DomainError(f"need eta <= 1/beta = {1.0 / beta!r}, got {eta!r}")
    if T < 1:
        raise DomainError(f"NAG quadratic bound needs T >= 1, got {T}")
    start = as_point(x0)
    report = CheckReport()
    worst = 0.0
    steps = np.arange(1, T + 1)
    for k, u in enumerate(_directions(make_rng(seed), start.shape[0], directions)):
        series = divergence_series(f, start, start + eps * u, T, eta)
        dx = series.magnitude("dx")[1:]
        bounds = 4.0 * steps * eps
        ratios = dx / bounds
        t = int(np.argmax(ratios)) + 1
        worst = max(worst, float(ratios[t - 1]))
        report.at_most(
            "nag_quadratic.upper",
            float(dx[t - 1]),
            float(bounds[t - 1]),
            allowance=series.allowance(t),
            t=t,
            direction=k,
            eigenvalues=np.array2string(f.eigenvalues, precision=6),
        )
    if strict:
        report.raise_for_failures()
    return worst
