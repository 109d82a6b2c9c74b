"""Subcommand runners and the nag-lab entry point."""

import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from src.cli.config import ExperimentConfig, parse_config
from src.errors import CheckFailure, DomainError, StabilityLabError, UsageError
from src.hardfn import (
    ConstructionResult,
    HardFnParams,
    PiecewiseQuadratic,
    build_hard_function,
    check_large_steps,
    read_construction,
    save_construction,
    verify_construction,
)
from src.optim import (
    QuadraticObjective,
    VariantKind,
    ZeroObjective,
    check_momentum_sums,
    check_variant_equivalence,
)
from src.quadmat import (
    check_block_reduction,
    check_linear_norm_bound,
    check_schur_power,
    counterexample_norm,
    cross_validate_transfer,
    random_quadratic_instance,
)
from src.stability import (
    C1,
    C2,
    DivergenceReport,
    check_gd_nonsmooth,
    check_gd_smooth_upper,
    check_nag_quadratic_upper,
    check_sandwich,
    construction_series,
    nag_convex_upper_report,
    sign_alternations,
    verify_evolution,
    verify_exponential_divergence,
)
from src.stability.lower import default_horizon
from src.uniform import (
    build_reduction_scenario,
    check_loss_regularity,
    format_scenario,
    nag_uniform_upper_report,
    quadratic_linear_lower,
    uniform_floor_horizon,
    uniform_gap,
    verify_reduction,
    verify_uniform_lower_bound,
)
from src.utils.checks import REPORT_HEADER, CheckReport
from src.utils.csv_utils import format_cell, write_csv
from src.utils.random_utils import make_rng, random_psd

logger = logging.getLogger(__name__)

LOG_FORMAT = "[%(name)s] %(message)s"
FIGURE_HEADER = ["t", "dx", "log10_abs_dx", "log10_lower", "log10_floor", "checkpoint"]
# eta values of the two figure presets, with G = beta = 1 and eps = 1e-6
FIGURE_PRESETS = (0.5, 0.1)
UNIFORM_GRID = (4, 10, 100)
LINEAR_GRID = ((2, 8, 64), (1, 10, 100))
VARIANT_TOL = 1e-9


@dataclass
class RunRecord:
    config: ExperimentConfig
    report: CheckReport = field(default_factory=CheckReport)
    outputs: List[Path] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    duration: float = 0.0

    @property
    def passed(self) -> bool:
        return self.report.passed

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def summary(self) -> str:
        lines = [f"nag-lab {self.config.command}: {'PASS' if self.passed else 'FAIL'}"]
        lines.extend(f"  {line}" for line in self.config.echo())
        for key, value in self.results.items():
            lines.append(f"  {key}: {value}")
        for path in self.outputs:
            lines.append(f"  wrote {path}")
        lines.append(f"  {self.report.summary()}".replace("\n", "\n  "))
        lines.append(f"  duration {self.duration:.3f} s")
        return "\n".join(lines)

    def report_lines(self) -> List[str]:
        return [",".join(REPORT_HEADER)] + [",".join(row) for row in self.report.rows()]

    def write_report(self, path: Path) -> Path:
        return write_csv(path, REPORT_HEADER, self.report.rows())


def _guard(report: CheckReport, name: str, check: Callable[..., Any], *args, **kwargs) -> Any:
    """Run a strict checker; a CheckFailure becomes a failed record, a value an info record."""
    try:
        value = check(*args, **kwargs)
    except CheckFailure as e:
        report.add(e.check, False, e.observed, e.required, **e.context)
        return None
    if isinstance(value, CheckReport):
        report.extend(value)
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        report.add(name, True, float(value), math.nan)
    else:
        report.add(name, bool(value), math.nan, math.nan)
    return value


def _params(config: ExperimentConfig) -> HardFnParams:
    try:
        return HardFnParams(config["G"], config["beta"], config["eta"], config["eps"])
    except DomainError as e:
        raise UsageError(str(e)) from e


def _construction(
    config: ExperimentConfig, report: Optional[CheckReport] = None
) -> ConstructionResult:
    """Build from the hard-function keys, or load ``construction``; loaded files are checked."""
    path = config.get("construction")
    if path is None:
        return build_hard_function(_params(config))
    logger.info("Loading construction from %s", path)
    cr = read_construction(path)
    if report is not None:
        report.extend(verify_construction(cr, strict=False))
    return cr


def _hard_fn_checks(cr: ConstructionResult, report: CheckReport) -> Dict[str, Any]:
    report.extend(verify_construction(cr, strict=False))
    report.extend(check_large_steps(cr, strict=False))
    report.extend(verify_evolution(cr, strict=False))
    series = verify_exponential_divergence(cr, strict=False)
    report.extend(check_sandwich(cr, series))
    p = cr.params
    report.extend(nag_convex_upper_report(cr.f_M_plus, 0.0, p.eps, series.steps, p.eta, p.beta))
    changes, transitions = sign_alternations(cr, series)
    report.at_least("divergence.sign_changes", changes, transitions - 1, transitions=transitions)
    return {"M": cr.M, "checkpoints": list(cr.checkpoints), "horizon": series.steps}


def run_construct(config: ExperimentConfig) -> RunRecord:
    record = RunRecord(config)
    cr = build_hard_function(_params(config))
    record.report.extend(verify_construction(cr, strict=False))
    record.report.extend(check_large_steps(cr, strict=False))
    record.results.update(
        M=cr.M, checkpoints=list(cr.checkpoints), minimizer=cr.minimizer, widths=cr.widths
    )
    if config.get("out_path") is not None:
        record.outputs.append(save_construction(cr, config["out_path"]))
    return record


def run_diverge(config: ExperimentConfig) -> RunRecord:
    record = RunRecord(config)
    cr = _construction(config, record.report)
    horizon = config.get("T", default_horizon(cr))
    series = verify_exponential_divergence(cr, horizon, strict=False)
    record.report.extend(series.checks)
    record.report.extend(check_sandwich(cr, series))
    final = float(series.magnitude("dx")[-1])
    record.results.update(M=cr.M, horizon=horizon, final_dx=final)
    if config.get("out_path") is not None:
        record.outputs.append(series.to_csv(config["out_path"]))
    return record


def _log10(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log10(values)


def figure_rows(cr: ConstructionResult, series: DivergenceReport) -> List[List[Any]]:
    """One row per step.

    The theoretical column is min{G/(3 beta), c2 exp(c1 eta beta t) eps} in log10.
    """
    p = cr.params
    T = series.steps
    t = series.t
    dx = series.signed("dx")
    log_floor = math.log10(p.floor)
    log_curve = math.log10(C2 * p.eps) + C1 * p.eta * p.beta * t / math.log(10.0)
    log_lower = np.minimum(log_curve, log_floor)
    marks = set(cr.checkpoints)
    i = len(cr.checkpoints) + 1
    while p.checkpoint(i) <= T:
        marks.add(p.checkpoint(i))
        i += 1
    log_dx = _log10(np.abs(dx))
    return [
        [int(k), float(dx[k]), float(log_dx[k]), float(log_lower[k]), log_floor, int(k in marks)]
        for k in range(T + 1)
    ]


def run_figure2(config: ExperimentConfig) -> RunRecord:
    """Per-step CSV of the divergence on f_M^+; T = 0 writes the header only."""
    record = RunRecord(config)
    cr = _construction(config, record.report)
    p = cr.params
    T = config.get("T", default_horizon(cr))
    out = config.get("out_path", Path(f"figure2_etabeta_{p.eta * p.beta:g}.csv"))
    if T == 0:
        record.outputs.append(write_csv(out, FIGURE_HEADER, []))
    else:
        series = construction_series(cr, T)
        record.outputs.append(write_csv(out, FIGURE_HEADER, figure_rows(cr, series)))
        record.report.extend(check_sandwich(cr, series))
        changes, transitions = sign_alternations(cr, series)
        record.report.at_least(
            "divergence.sign_changes", changes, transitions - 1, transitions=transitions
        )
        record.results.update(M=cr.M, checkpoints=list(cr.checkpoints), sign_changes=changes)
    record.results["horizon"] = T
    return record


def run_uniform(config: ExperimentConfig) -> RunRecord:
    record = RunRecord(config)
    hat_G, hat_beta, hat_eta, n = config["G"], config["beta"], config["eta"], config["n"]
    try:
        sc = build_reduction_scenario(hat_G, hat_beta, hat_eta, n)
    except DomainError as e:
        raise UsageError(str(e)) from e
    floor_h = uniform_floor_horizon(hat_eta, hat_beta, n)
    T = config.get("T", max(floor_h + 1, sc.construction.checkpoints[-1]))
    report = record.report
    _guard(report, "reduction.max_deviation", verify_reduction, sc, T)
    report.extend(verify_uniform_lower_bound(sc, T, strict=False))
    report.extend(check_loss_regularity(sc))
    gap = _guard(report, "uniform.gap", uniform_gap, sc, T)
    first = sc.construction.checkpoints[0]
    report.extend(nag_uniform_upper_report(sc.R_S, sc.R_S_prime, hat_G, n, first, hat_eta))
    record.results.update(
        eta=sc.params.eta, eps=sc.params.eps, M=sc.construction.M, T=T, gap=gap
    )
    out = config.get("out_path")
    if out is not None:
        out = Path(out)
        construction_path = out.with_name(out.stem + "_construction.txt")
        record.outputs.append(save_construction(sc.construction, construction_path))
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(format_scenario(sc, str(construction_path)), encoding="utf-8")
        record.outputs.append(out)
    return record


def _quadmat_checks(report: CheckReport, trials: int, t_max: int, seed: int, failure_dir=None):
    worst = _guard(
        report,
        "norm_bound.max_ratio",
        check_linear_norm_bound,
        trials,
        t_max,
        seed,
        failure_dir=failure_dir,
    )
    for t in range(3, 61, 3):
        _guard(report, "counterexample.norm", counterexample_norm, t)
    _guard(report, "block_reduction.max_deviation", check_block_reduction, seed=seed)
    for lambda1, lambda2, c in ((1.0, 0.0, 1.0), (0.5, 0.5, 1.0), (0.6 + 0.3j, 0.6 - 0.3j, 0.7)):
        for t in (1, 2, 10, 50):
            _guard(report, "schur.max_deviation", check_schur_power, lambda1, lambda2, c, t)
    for trial in range(trials):
        rng = make_rng(seed, 7, trial)
        d = int(rng.integers(1, 4))
        eta = float(rng.uniform(0.1, 1.0))
        H, b, x0, x0_tilde = random_quadratic_instance(rng, d, eta)
        _guard(
            report, "transfer.max_deviation", cross_validate_transfer, H, eta, x0, x0_tilde, 100, b
        )
    return worst


def run_quadnorm(config: ExperimentConfig) -> RunRecord:
    record = RunRecord(config)
    worst = _quadmat_checks(
        record.report, config["trials"], config["T"], config["seed"], config.get("out_path")
    )
    record.results["max_norm_ratio"] = worst
    return record


def _variant_checks(report: CheckReport, beta: float, T: int, trials: int, seed: int) -> float:
    worst = 0.0
    instances = []
    for trial in range(trials):
        rng = make_rng(seed, 11, trial)
        d = int(rng.integers(1, 4))
        instances.append((QuadraticObjective(random_psd(rng, d, 0.0, beta)), rng.normal(size=d)))
    instances.append((PiecewiseQuadratic(1.0, beta), np.zeros(1)))
    for k, (f, x0) in enumerate(instances):
        for kind in (VariantKind.VARIANT1, VariantKind.VARIANT2):
            deviation = check_variant_equivalence(kind, f, x0, T, beta=beta)
            report.add(
                f"variants.{kind.value}",
                deviation <= VARIANT_TOL,
                deviation,
                VARIANT_TOL,
                instance=k,
            )
            worst = max(worst, deviation)
    return worst


def run_variants(config: ExperimentConfig) -> RunRecord:
    record = RunRecord(config)
    record.results["max_deviation"] = _variant_checks(
        record.report, config["beta"], config["T"], config["trials"], config["seed"]
    )
    return record


def _upper_checks(report: CheckReport, trials: int, seed: int) -> None:
    for trial in range(trials):
        rng = make_rng(seed, 13, trial)
        d = int(rng.integers(1, 4))
        beta = float(rng.uniform(0.5, 2.0))
        eta = 1.0 / beta
        f = QuadraticObjective(random_psd(rng, d, 0.0, beta))
        x0 = rng.normal(size=d)
        _guard(
            report,
            "gd_smooth.max_divergence",
            check_gd_smooth_upper,
            f,
            x0,
            1e-3,
            1000,
            eta,
            seed=trial,
        )
        H = random_psd(rng, d, 0.0, beta)
        _guard(
            report,
            "nag_quadratic.max_ratio",
            check_nag_quadratic_upper,
            H,
            x0,
            1e-3,
            500,
            eta,
            seed=trial,
        )
    zero = ZeroObjective(2)
    flat = _guard(report, "gd_smooth.zero", check_gd_smooth_upper, zero, [0.0, 0.0], 1e-3, 100, 1.0)
    if flat is not None:
        report.close("gd_smooth.zero_exact", abs(flat - 1e-3), 1e-3)
    _guard(report, "gd_nonsmooth.witness", lambda: check_gd_nonsmooth(1e-3, 1.0, 0.1, 16, 16)[1])


def run_verify_all(config: ExperimentConfig) -> RunRecord:
    record = RunRecord(config)
    report = record.report
    trials, seed, t_max = config["trials"], config["seed"], config["T"]
    report.extend(check_momentum_sums())

    constructions = [_construction(config)]
    for eta in FIGURE_PRESETS:
        params = HardFnParams(G=1.0, beta=1.0, eta=eta, eps=1e-6)
        if params != constructions[0].params:
            constructions.append(build_hard_function(params))
    for cr in constructions:
        outcome = _hard_fn_checks(cr, report)
        record.results[f"construction eta={cr.params.eta:g}"] = outcome

    for n in UNIFORM_GRID:
        sc = build_reduction_scenario(1.0, 1.0, 1.0, n)
        floor_h = uniform_floor_horizon(1.0, 1.0, n)
        _guard(report, "reduction.max_deviation", verify_reduction, sc, floor_h + 1)
        report.extend(verify_uniform_lower_bound(sc, strict=False))
        report.extend(check_loss_regularity(sc))
        first = sc.construction.checkpoints[0]
        _guard(report, "uniform.gap", uniform_gap, sc, first)
        report.extend(nag_uniform_upper_report(sc.R_S, sc.R_S_prime, 1.0, n, first, 1.0))
    for n in LINEAR_GRID[0]:
        for T in LINEAR_GRID[1]:
            _guard(report, "linear.simulated", lambda: quadratic_linear_lower(1.0, 1.0, n, T)[1])

    record.results["max_norm_ratio"] = _quadmat_checks(report, trials, t_max, seed)
    _upper_checks(report, trials, seed)
    record.results["max_variant_deviation"] = _variant_checks(report, 1.0, 100, trials, seed)
    return record


RUNNERS: Dict[str, Callable[[ExperimentConfig], RunRecord]] = {
    "construct": run_construct,
    "diverge": run_diverge,
    "verify": run_verify_all,
    "uniform": run_uniform,
    "quadnorm": run_quadnorm,
    "variants": run_variants,
    "figure2": run_figure2,
}


def run(config: ExperimentConfig) -> RunRecord:
    start = time.perf_counter()
    logger.info("Running %s", config.command)
    record = RUNNERS[config.command](config)
    record.duration = time.perf_counter() - start
    logger.info("%s finished in %.3f s", config.command, record.duration)
    return record


def configure_logging(config: ExperimentConfig) -> None:
    level = logging.DEBUG if config.debug else logging.WARNING if config.quiet else logging.INFO
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Exit codes: 0 all checks passed, 1 a check failed, 2 usage error."""
    try:
        config = parse_config(argv)
    except UsageError as e:
        print(f"nag-lab: {e}", file=sys.stderr)
        return 2
    configure_logging(config)
    try:
        record = run(config)
    except UsageError as e:
        print(f"nag-lab: {e}", file=sys.stderr)
        return 2
    except CheckFailure as e:
        print(f"nag-lab: {e}", file=sys.stderr)
        print(f"{e.check},fail,{format_cell(e.observed)},{format_cell(e.required)}")
        return 1
    except StabilityLabError as e:
        print(f"nag-lab: {config.command} failed: {e}", file=sys.stderr)
        return 1
    print(record.summary())
    report_path = config.get("report_path")
    if report_path is not None:
        record.write_report(report_path)
    else:
        print("\n".join(record.report_lines()))
    return record.exit_code
