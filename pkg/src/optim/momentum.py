"""Sums of products of momentum coefficients that drive the divergence estimates."""

import logging

from src.errors import DomainError
from src.optim.nag import momentum_coeff
from src.utils.checks import CheckReport

logger = logging.getLogger(__name__)


def momentum_tail_sum(t: int) -> float:
    """sum_{k=2}^{t} prod_{j=k}^{t} gamma_j, accumulated from k = t downwards."""
    if t < 1:
        raise DomainError(f"tail sum needs t >= 1, got {t}")
    total = 0.0
    product = 1.0
    for j in range(t, 1, -1):
        product *= momentum_coeff(j)
        total += product
    return total


def partial_product_sum(n: int, m: int) -> float:
    """sum_{k=n}^{m} prod_{s=n}^{k-1} gamma_{s+1}; the k = n term is the empty product."""
    if n < 1 or m < n:
        raise DomainError(f"partial product sum needs 1 <= n <= m, got n={n}, m={m}")
    total = 0.0
    product = 1.0
    for k in range(n, m + 1):
        if k > n:
            product *= momentum_coeff(k)
        total += product
    return total


def tail_sum_lower(t: int) -> float:
    return (t - 1) ** 2 / (4.0 * (t + 2))


def partial_sum_lower(n: int, m: int) -> float:
    return 0.5 * n * (1.0 - n * n / (m + 1) ** 2)


def check_momentum_sums(t_max: int = 200) -> CheckReport:
    """Both lower bounds over 2 <= t <= t_max and 1 <= n < m <= t_max.

    The pair sweep records the tightest margin per n rather than one record per pair.
    """
    report = CheckReport()
    for t in range(2, t_max + 1):
        report.at_least("momentum.tail_sum", momentum_tail_sum(t), tail_sum_lower(t), t=t)
    for n in range(1, t_max):
        total = 1.0
        product = 1.0
        worst_m, worst_margin, worst_value, worst_bound = n + 1, float("inf"), 0.0, 0.0
        for m in range(n + 1, t_max + 1):
            product *= momentum_coeff(m)
            total += product
            bound = partial_sum_lower(n, m)
            if total - bound < worst_margin:
                worst_m, worst_margin, worst_value, worst_bound = m, total - bound, total, bound
        report.at_least("momentum.partial_sum", worst_value, worst_bound, n=n, m=worst_m)
    logger.info("Momentum sums up to %d: %s", t_max, "pass" if report.passed else "FAIL")
    return report
