"""Transfer matrices of NAG on quadratics and their products."""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from src.errors import DomainError
from src.optim.nag import momentum_coeff
from src.utils.checks import CheckReport
from src.utils.numeric import PointLike, as_point, rounding_allowance

logger = logging.getLogger(__name__)

# eigenvalues of A may leave [0, 1] by this much
SPECTRUM_TOL = 1e-12
SCHUR_TOL = 1e-10

MatrixLike = Union[float, int, np.ndarray]


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """[[(1 + gamma) A, -gamma A], [I, 0]] acting on (dx_t, dx_{t-1})."""

    A: np.ndarray
    gamma: float
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.A.shape[0]

    @property
    def is_scalar(self) -> bool:
        return self.dimension == 1

    def __matmul__(self, other):
        if isinstance(other, TransferMatrix):
            return self.matrix @ other.matrix
        return self.matrix @ other


def _as_square(A: MatrixLike) -> np.ndarray:
    a = np.atleast_2d(np.array(A, dtype=float))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"A must be a scalar or a square matrix, got shape {a.shape}")
    return a


def build_transfer(A: MatrixLike, gamma: float) -> TransferMatrix:
    a = _as_square(A)
    if not -1.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [-1, 1], got {gamma}")
    if not np.allclose(a, a.T, rtol=0.0, atol=SPECTRUM_TOL):
        raise DomainError("A must be symmetric")
    eigenvalues = np.linalg.eigvalsh(a) if a.shape[0] > 1 else a[0]
    if eigenvalues.min() < -SPECTRUM_TOL or eigenvalues.max() > 1.0 + SPECTRUM_TOL:
        raise DomainError(
            f"eigenvalues of A must lie in [0, 1], got [{eigenvalues.min()!r}, "
            f"{eigenvalues.max()!r}]"
        )
    d = a.shape[0]
    matrix = np.block([[(1.0 + gamma) * a, -gamma * a], [np.eye(d), np.zeros((d, d))]])
    a.setflags(write=False)
    matrix.setflags(write=False)
    return TransferMatrix(A=a, gamma=float(gamma), matrix=matrix)


def norm_2x2(a: float, b: float, c: float, d: float) -> float:
    """Largest singular value of [[a, b], [c, d]] from the eigenvalues of M^T M."""
    p = a * a + c * c
    q = b * b + d * d
    r = a * b + c * d
    return math.sqrt(0.5 * (p + q) + math.hypot(0.5 * (p - q), r))


def spectral_norm(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    if m.shape == (2, 2):
        return norm_2x2(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    return float(np.linalg.norm(m, ord=2))


def product_matrix(matrices: Sequence[TransferMatrix]) -> np.ndarray:
    """M_t ... M_1 for the sequence (M_1, ..., M_t): later matrices act last."""
    if not matrices:
        raise DomainError("product of an empty sequence")
    dims = {m.dimension for m in matrices}
    if len(dims) != 1:
        raise DomainError(f"transfer matrices disagree on dimension: {sorted(dims)}")
    product = matrices[0].matrix
    for m in matrices[1:]:
        product = m.matrix @ product
    return product


def product_norm(matrices: Sequence[TransferMatrix]) -> float:
    return spectral_norm(product_matrix(matrices))


def schur_power(lambda1: complex, lambda2: complex, c: complex, t: int) -> np.ndarray:
    """t-th power of [[l1, c], [0, l2]]: off-diagonal c sum_{i<t} l1^i l2^(t-1-i)."""
    if t < 1:
        raise DomainError(f"power must be >= 1, got {t}")
    l1, l2 = complex(lambda1), complex(lambda2)
    off = sum(l1 ** i * l2 ** (t - 1 - i) for i in range(t))
    return np.array([[l1 ** t, complex(c) * off], [0.0, l2 ** t]], dtype=complex)


def check_schur_power(
    lambda1: complex, lambda2: complex, c: complex, t: int, strict: bool = True
) -> float:
    """Largest entrywise relative deviation of schur_power from repeated multiplication."""
    closed = schur_power(lambda1, lambda2, c, t)
    naive = np.linalg.matrix_power(
        np.array([[lambda1, c], [0.0, lambda2]], dtype=complex), t
    )
    allowance = rounding_allowance(float(np.max(np.abs(naive))), t)
    report = CheckReport()
    worst = 0.0
    for (i, j), value in np.ndenumerate(closed):
        deviation = abs(value - naive[i, j])
        magnitude = max(abs(value), abs(naive[i, j]))
        report.close(
            "schur.entry", deviation, magnitude, tol=SCHUR_TOL, allowance=allowance, entry=(i, j)
        )
        if magnitude > 0.0:
            worst = max(worst, deviation / magnitude)
    if strict:
        report.raise_for_failures()
    return worst


def _spectrum_of(H: np.ndarray) -> Tuple[float, float]:
    eigenvalues = np.linalg.eigvalsh(H)
    return float(eigenvalues.min()), float(eigenvalues.max())


def nag_quadratic_divergence_via_transfer(
    H: MatrixLike, eta: float, dx0: PointLike, dx1: PointLike, T: int
) -> np.ndarray:
    """Rows dx_0..dx_T from (dx_1, dx_0) through the transfer matrices of gamma_1..gamma_{T-1}."""
    h = _as_square(H)
    if not np.allclose(h, h.T, rtol=0.0, atol=SPECTRUM_TOL):
        raise DomainError("H must be symmetric")
    low, high = _spectrum_of(h)
    if low < -SPECTRUM_TOL or eta * high > 1.0 + SPECTRUM_TOL:
        raise DomainError(f"need 0 <= H <= I/eta, got spectrum [{low!r}, {high!r}], eta={eta!r}")
    if T < 0:
        raise DomainError(f"need T >= 0, got {T}")
    d = h.shape[0]
    A = np.eye(d) - eta * h
    first, second = as_point(dx0), as_point(dx1)
    if first.shape != (d,) or second.shape != (d,):
        raise DomainError(f"differences must have dimension {d}")
    rows = np.zeros((T + 1, d))
    rows[0] = first
    if T >= 1:
        rows[1] = second
    state = np.concatenate([second, first])
    for t in range(1, T):
        state = build_transfer(A, momentum_coeff(t)) @ state
        rows[t + 1] = state[:d]
    return rows
