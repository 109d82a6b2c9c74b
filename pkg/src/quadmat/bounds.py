"""Norm bounds on products of transfer matrices, checked over random and adversarial schedules."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DomainError
from src.optim.nag import momentum_coeff
from src.optim.objectives import QuadraticObjective
from src.quadmat.transfer import (
    SPECTRUM_TOL,
    TransferMatrix,
    build_transfer,
    nag_quadratic_divergence_via_transfer,
    norm_2x2,
    product_norm,
    spectral_norm,
)
from src.stability.divergence import divergence_series
from src.utils.checks import CheckReport
from src.utils.csv_utils import format_float, write_csv
from src.utils.numeric import PointLike, as_point
from src.utils.random_utils import make_rng, psd_from_spectrum, random_orthogonal, random_psd

logger = logging.getLogger(__name__)

NORM_SLACK = 1e-9
BLOCK_TOL = 1e-9
TRANSFER_TOL = 1e-10
COUNTEREXAMPLE_GAMMA = 0.9
COUNTEREXAMPLE_RATE = 1.15
SCHEDULE_HEADER = ["k", "gamma_k", "a_k"]

Schedule = Tuple[List[float], List[np.ndarray]]


def schedule_rows(gammas: Sequence[float], As: Sequence[np.ndarray]) -> List[List[str]]:
    """CSV rows k, gamma_k, a_k; block A's are written as their row-major entries joined by ';'."""
    rows = []
    for k, (gamma, A) in enumerate(zip(gammas, As), start=1):
        a = np.atleast_1d(A).ravel()
        rows.append([str(k), format_float(gamma), ";".join(format_float(v) for v in a)])
    return rows


def random_schedule(rng: np.random.Generator, t_max: int, d: int) -> Schedule:
    """gamma_k uniform in [-1, 1]; A_k scalar in [0, 1] or PSD with spectrum in [0, 1]."""
    gammas = list(rng.uniform(-1.0, 1.0, size=t_max))
    if d == 1:
        As = [np.array([[a]]) for a in rng.uniform(0.0, 1.0, size=t_max)]
    else:
        As = [random_psd(rng, d, 0.0, 1.0) for _ in range(t_max)]
    return gammas, As


def _scalar_prefix_norms(gammas: Sequence[float], As: Sequence[np.ndarray]) -> np.ndarray:
    # running product kept as four floats
    p00, p01, p10, p11 = 1.0, 0.0, 0.0, 1.0
    norms = np.empty(len(gammas))
    for k, (gamma, A) in enumerate(zip(gammas, As)):
        a = float(np.asarray(A).ravel()[0])
        if not (-1.0 <= gamma <= 1.0 and -SPECTRUM_TOL <= a <= 1.0 + SPECTRUM_TOL):
            raise DomainError(
                f"step {k + 1}: need gamma in [-1, 1] and A in [0, 1], got {gamma}, {a}"
            )
        u, v = (1.0 + gamma) * a, -gamma * a
        p00, p01, p10, p11 = u * p00 + v * p10, u * p01 + v * p11, p00, p01
        norms[k] = norm_2x2(p00, p01, p10, p11)
    return norms


def prefix_norms(gammas: Sequence[float], As: Sequence[np.ndarray]) -> np.ndarray:
    """Norms of M_t ... M_1 for every prefix length t = 1..len(gammas)."""
    if len(gammas) != len(As) or not gammas:
        raise DomainError("schedule needs matching, nonempty gamma and A sequences")
    if np.asarray(As[0]).size == 1:
        return _scalar_prefix_norms(gammas, As)
    product: Optional[np.ndarray] = None
    norms = np.empty(len(gammas))
    for k, (gamma, A) in enumerate(zip(gammas, As)):
        m = build_transfer(A, gamma).matrix
        product = m if product is None else m @ product
        norms[k] = spectral_norm(product)
    return norms


def check_linear_norm_bound(
    trials: int,
    t_max: int,
    rng_seed: int = 0,
    max_dim: int = 4,
    failure_dir: Optional[Path] = None,
    strict: bool = True,
) -> float:
    """Every prefix product of every schedule has norm <= 2 (t + 1).

    Even trials use scalar A, odd trials blocks of dimension 2..max_dim. The canonical
    schedule gamma_k = (k - 1)/(k + 2) is swept for A in {0, 0.5, 1}. Returns the largest
    observed norm / (2 (t + 1)). Failing schedules are written to ``failure_dir``.
    """
    if t_max < 1 or trials < 1:
        raise DomainError(f"need t_max >= 1 and trials >= 1, got {t_max}, {trials}")
    if not 1 <= max_dim <= 4:
        raise DomainError(f"block dimension must be in 1..4, got {max_dim}")
    bounds = 2.0 * (np.arange(1, t_max + 1) + 1.0)
    report = CheckReport()
    worst = 0.0

    def record(label: str, gammas, As, **context) -> None:
        nonlocal worst
        ratios = prefix_norms(gammas, As) / bounds
        k = int(np.argmax(ratios))
        worst = max(worst, float(ratios[k]))
        passed = report.at_most(
            "norm_bound.prefix",
            float(ratios[k] * bounds[k]),
            float(bounds[k]),
            slack=NORM_SLACK,
            t=k + 1,
            schedule=label,
            **context,
        )
        if not passed and failure_dir is not None:
            path = Path(failure_dir) / f"schedule_{label}.csv"
            write_csv(path, SCHEDULE_HEADER, schedule_rows(gammas[: k + 1], As[: k + 1]))
            logger.warning("Failing schedule written to %s", path)

    for trial in range(trials):
        rng = make_rng(rng_seed, trial)
        d = 1 if trial % 2 == 0 or max_dim == 1 else int(rng.integers(2, max_dim + 1))
        gammas, As = random_schedule(rng, t_max, d)
        record(f"trial{trial}", gammas, As, d=d, seed=rng_seed)

    canonical = [momentum_coeff(k) for k in range(1, t_max + 1)]
    for a in (0.0, 0.5, 1.0):
        record(f"canonical_a{a:g}", canonical, [np.array([[a]])] * t_max, d=1)

    growth = prefix_norms(canonical, [np.array([[1.0]])] * t_max)
    report.info("norm_bound.canonical_growth", float(growth[-1] / t_max), t=t_max)
    logger.info(
        "Norm bound over %d trials to t=%d: max ratio %.6g, canonical A=1 norm %.6g",
        trials,
        t_max,
        worst,
        growth[-1],
    )
    if strict:
        report.raise_for_failures()
    return worst


def counterexample_schedule(t: int) -> List[TransferMatrix]:
    """gamma = 0.9 with A_k = 0 whenever k is a multiple of 3 and A_k = 1 otherwise."""
    return [
        build_transfer(0.0 if k % 3 == 0 else 1.0, COUNTEREXAMPLE_GAMMA) for k in range(1, t + 1)
    ]


def counterexample_norm(t: int, strict: bool = True) -> float:
    if t < 3 or t % 3 != 0:
        raise DomainError(f"t must be a positive multiple of 3, got {t}")
    norm = product_norm(counterexample_schedule(t))
    report = CheckReport()
    report.at_least("counterexample.growth", norm, COUNTEREXAMPLE_RATE ** t, t=t)
    logger.info("Counterexample product norm at t=%d: %.6g", t, norm)
    if strict:
        report.raise_for_failures()
    return norm


def check_block_reduction(
    trials: int = 50, t: int = 20, d_max: int = 4, seed: int = 0, strict: bool = True
) -> float:
    """Block products with simultaneously diagonalizable A_k against their scalar channels.

    The block norm must equal the largest scalar-channel norm; returns the largest relative
    deviation.
    """
    if not 2 <= d_max <= 4 or t < 1 or trials < 1:
        raise DomainError(f"need 2 <= d_max <= 4, t >= 1 and trials >= 1, got {d_max}, {t}")
    report = CheckReport()
    worst = 0.0
    for trial in range(trials):
        rng = make_rng(seed, trial)
        d = int(rng.integers(2, d_max + 1))
        q = random_orthogonal(rng, d)
        spectra = rng.uniform(0.0, 1.0, size=(t, d))
        gammas = rng.uniform(-1.0, 1.0, size=t)
        blocks = [build_transfer(psd_from_spectrum(q, s), g) for s, g in zip(spectra, gammas)]
        block_norm = product_norm(blocks)
        channels = [
            product_norm([build_transfer(s[j], g) for s, g in zip(spectra, gammas)])
            for j in range(d)
        ]
        expected = max(channels)
        deviation = abs(block_norm - expected)
        magnitude = max(block_norm, expected)
        report.close("block_reduction", deviation, magnitude, tol=BLOCK_TOL, trial=trial, d=d)
        worst = max(worst, deviation / magnitude)
    if strict:
        report.raise_for_failures()
    return worst


def cross_validate_transfer(
    H: np.ndarray,
    eta: float,
    x0: PointLike,
    x0_tilde: PointLike,
    T: int,
    linear: Optional[PointLike] = None,
    strict: bool = True,
) -> float:
    """Transfer-matrix differences against two direct NAG runs on x^T H x / 2 + b^T x.

    Returns the largest deviation relative to max(|a|, |b|, ||x0 - x0~||).
    """
    if T < 1:
        raise DomainError(f"need T >= 1, got {T}")
    f = QuadraticObjective(H, linear)
    start, start_tilde = as_point(x0), as_point(x0_tilde)
    series = divergence_series(f, start, start_tilde, T, eta)
    dx0 = start - start_tilde
    A = np.eye(dx0.shape[0]) - eta * np.asarray(H, dtype=float)
    via_transfer = nag_quadratic_divergence_via_transfer(H, eta, dx0, A @ dx0, T)
    direct = series.dx
    scale = np.maximum(
        np.maximum(np.max(np.abs(direct), axis=1), np.max(np.abs(via_transfer), axis=1)),
        series.eps,
    )
    deviation = np.max(np.abs(direct - via_transfer), axis=1)
    # injected rounding is amplified by at most the 2 (t + 1) norm bound
    steps = np.arange(T + 1)
    limit = TRANSFER_TOL * scale + 2.0 * (steps + 1.0) * series.allowances()
    k = int(np.argmax(deviation - limit))
    report = CheckReport()
    report.add(
        "transfer.cross_validation",
        bool(deviation[k] <= limit[k]),
        float(deviation[k]),
        float(limit[k]),
        t=k,
    )
    if strict:
        report.raise_for_failures()
    return float(np.max(deviation / scale))


def random_quadratic_instance(
    rng: np.random.Generator, d: int, eta: float, eps: float = 1e-3
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(H, b, x0, x0~) with spectrum of H in [0, 1/eta] and ||x0 - x0~|| = eps."""
    H = random_psd(rng, d, 0.0, 1.0 / eta)
    b = rng.normal(size=d)
    x0 = rng.normal(size=d)
    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction)
    return H, b, x0, x0 + eps * direction


def canonical_matrices(a: float, t: int) -> List[TransferMatrix]:
    return [build_transfer(a, momentum_coeff(k)) for k in range(1, t + 1)]
