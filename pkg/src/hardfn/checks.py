"""Structural checks of a finished construction.

Every check re-derives its quantity from the stored intervals, so a corrupted
``ConstructionResult`` (for example a hand-edited file) fails here rather than later.
"""

import logging
import math
from typing import Tuple

import numpy as np

from src.hardfn.construction import ConstructionResult, HardFnParams, floor_horizon
from src.hardfn.piecewise import PiecewiseQuadratic
from src.optim.nag import Trajectory, run_nag
from src.optim.objectives import sample_regularity
from src.utils.checks import CheckReport
from src.utils.numeric import DBL_EPS, rounding_allowance
from src.utils.random_utils import make_rng

logger = logging.getLogger(__name__)

RunPair = Tuple[Trajectory, Trajectory]


def paired_runs(f: PiecewiseQuadratic, params: HardFnParams, T: int) -> RunPair:
    """NAG from 0 and from eps on ``f``."""
    return run_nag(f, 0.0, T, params.eta), run_nag(f, params.eps, T, params.eta)


def check_horizon(cr: ConstructionResult) -> int:
    """Last step examined by checks that look past the final checkpoint."""
    return max(floor_horizon(cr.params), cr.checkpoints[-1]) + cr.checkpoints[0]


def minimizer_distance_bound(params: HardFnParams) -> float:
    steps = params.block * (params.log_ratio + 2.0) + 1.0
    return 2.0 * params.eps + params.G / params.beta + 0.5 * params.eta * params.G * steps**2


def _identical(a: Trajectory, b: Trajectory, upto: int) -> Tuple[bool, float]:
    same = all(
        np.array_equal(u[: upto + 1], v[: upto + 1])
        for u, v in ((a.xs, b.xs), (a.ys, b.ys), (a.ms, b.ms))
    )
    deviation = float(np.max(np.abs(a.ys[: upto + 1] - b.ys[: upto + 1])))
    return same, deviation


def _check_phases(cr: ConstructionResult, runs_M: RunPair, report: CheckReport):
    params = cr.params
    for j, (n_j, (a, b)) in enumerate(zip(cr.checkpoints, cr.phase_intervals), start=1):
        expected_n = params.checkpoint(j)
        report.add("construction.checkpoint", n_j == expected_n, n_j, expected_n, phase=j)
        if n_j != expected_n:
            continue
        runs_prev = paired_runs(cr.f_M.truncated(min(j - 1, cr.M)), params, n_j)
        for label, prev, full in zip(("0", "eps"), runs_prev, runs_M):
            same, deviation = _identical(prev, full, n_j)
            report.add("construction.consistency", same, deviation, 0.0, phase=j, start=label)
        y, y_tilde = runs_prev[0].ys[n_j, 0], runs_prev[1].ys[n_j, 0]
        lo, hi = min(y, y_tilde), max(y, y_tilde)
        deviation = max(abs(lo - a), abs(hi - b))
        report.add("construction.endpoints", lo == a and hi == b, deviation, 0.0, phase=j)


def _check_intervals(cr: ConstructionResult, report: CheckReport):
    params = cr.params
    widths = cr.widths
    a_1, b_1 = cr.phase_intervals[0]
    report.close(
        "construction.first_width",
        abs(widths[0] - params.eps),
        params.eps,
        allowance=rounding_allowance(b_1, cr.checkpoints[0]),
    )
    for j in range(1, len(widths)):
        a_next, b_next = cr.phase_intervals[j]
        report.at_least(
            "construction.separation",
            a_next - cr.phase_intervals[j - 1][1],
            params.target_length - widths[j - 1],
            phase=j,
        )
        report.at_least(
            "construction.growth",
            widths[j],
            (10.0 / 3.0) * widths[j - 1],
            allowance=rounding_allowance(b_next, cr.checkpoints[j]),
            phase=j,
        )
    report.at_least("construction.M_lower", cr.M, 1)
    report.at_most("construction.M_upper", cr.M, params.log_ratio, phase_count=cr.M)
    covered = cr.f_M.covered_length
    target = params.target_length
    report.add("construction.covered", covered < target, covered, target)
    report.add(
        "construction.covered_next",
        covered + widths[-1] >= params.target_length,
        covered + widths[-1],
        params.target_length,
    )


def _check_plateau(cr: ConstructionResult, runs_M: RunPair, report: CheckReport, seed: int):
    params = cr.params
    f, f_plus = cr.f_M, cr.f_M_plus
    plateau = cr.plateau
    p_expected = f.intervals[-1][1] if f.intervals else math.nan
    anchored = plateau.p == p_expected and plateau.g_p == f.grad(plateau.p)
    report.add("construction.plateau_anchor", anchored, plateau.p, p_expected, g_p=plateau.g_p)

    g_star = f_plus.grad(cr.minimizer)
    report.add("construction.minimizer_gradient", g_star == 0.0, g_star, 0.0)
    bound = minimizer_distance_bound(params)
    for x0 in (0.0, params.eps):
        distance = abs(x0 - cr.minimizer)
        report.add("construction.minimizer_distance", distance < bound, distance, bound, x0=x0)

    starts = (f_plus.grad(0.0), f_plus.grad(params.eps))
    report.add(
        "construction.start_gradient",
        starts[0] == -params.G and starts[1] == -params.G,
        max(starts),
        -params.G,
    )

    rng = make_rng(seed, 1)
    points = np.append(rng.uniform(-1.0, plateau.p, size=99), plateau.p)
    mismatches = sum(1 for x in points if f_plus.grad(x) != f.grad(x))
    report.add("construction.plateau_identity", mismatches == 0, mismatches, 0)

    n_M = cr.checkpoints[cr.M - 1]
    horizon = check_horizon(cr)
    runs_plus = paired_runs(f_plus, params, horizon)
    for label, plus, plain in zip(("0", "eps"), runs_plus, runs_M):
        same, deviation = _identical(plus, plain, n_M + 1)
        report.add("construction.plateau_runs", same, deviation, 0.0, start=label)
        tail = plus.ys[n_M + 1 :, 0]
        flat = sum(1 for y in tail if f_plus.grad(y) != 0.0)
        report.add("construction.flatness", flat == 0, flat, 0, start=label, steps=tail.size)


def _check_trajectories(cr: ConstructionResult, runs_M: RunPair, report: CheckReport):
    for label, run in zip(("0", "eps"), runs_M):
        ys = run.ys[:, 0]
        steps = np.diff(ys)
        report.at_least("construction.ascent", float(np.min(steps)), 0.0, start=label)
        for j, (n_j, (a, b)) in enumerate(zip(cr.checkpoints, cr.phase_intervals), start=1):
            before = float(np.max(ys[:n_j]))
            report.add("construction.placement_before", before < a, before, a, phase=j, start=label)
            if n_j + 1 < ys.size:
                after = float(np.min(ys[n_j + 1 :]))
                report.add(
                    "construction.placement_after", after > b, after, b, phase=j, start=label
                )


def _check_regularity(cr: ConstructionResult, report: CheckReport, pairs: int, seed: int):
    params = cr.params
    low, high = -1.0, cr.minimizer + 1.0
    noise = 8.0 * DBL_EPS * (params.G + params.beta * max(abs(low), abs(high)))
    max_grad, max_ratio = sample_regularity(
        cr.f_M_plus, low, high, pairs, make_rng(seed, 2), noise=noise
    )
    report.at_most("construction.lipschitz", max_grad, params.G, pairs=pairs)
    report.at_most("construction.smoothness", max_ratio, params.beta, pairs=pairs)


def verify_construction(
    cr: ConstructionResult, strict: bool = True, pairs: int = 10_000, seed: int = 0
) -> CheckReport:
    """Re-derive and check every structural property of a construction.

    Raises ``CheckFailure`` on the first failed check when ``strict``.
    """
    report = CheckReport()
    runs_M = paired_runs(cr.f_M, cr.params, cr.checkpoints[-1])
    _check_phases(cr, runs_M, report)
    _check_intervals(cr, report)
    _check_plateau(cr, runs_M, report, seed)
    _check_trajectories(cr, runs_M, report)
    _check_regularity(cr, report, pairs, seed)
    logger.info("Construction checks (M=%d): %s", cr.M, report.summary().splitlines()[0])
    if strict:
        report.raise_for_failures()
    return report


def check_large_steps(cr: ConstructionResult, strict: bool = True) -> CheckReport:
    """Step sizes of y on f_M.

    At least eta G / 2 at every step, above 2G/beta after ceil(20 / (eta beta)).
    """
    params = cr.params
    report = CheckReport()
    late = math.ceil(20.0 / (params.eta * params.beta))
    middle = params.block
    runs = paired_runs(cr.f_M, params, cr.checkpoints[-1])
    for label, run in zip(("0", "eps"), runs):
        ys = run.ys[:, 0]
        steps = np.diff(ys)  # steps[t - 1] = y_t - y_{t-1}
        allowance = rounding_allowance(float(np.max(np.abs(ys))), 2)
        report.at_least(
            "steps.minimum",
            float(np.min(steps)),
            0.5 * params.eta * params.G,
            allowance=allowance,
            start=label,
        )
        if steps.size > late:
            smallest = float(np.min(steps[late:]))
            required = 2.0 * params.G / params.beta
            report.add(
                "steps.large", smallest > required, smallest, required, start=label, after=late
            )
        if steps.size > middle:
            window = steps[middle : min(late, steps.size)]
            if window.size:
                report.info(
                    "steps.intermediate", float(np.min(window)), 2.0 * params.G / params.beta,
                    start=label,
                )
    if strict:
        report.raise_for_failures()
    return report
