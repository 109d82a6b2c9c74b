"""Line-oriented text format for construction results.

    G beta eta eps M
    j n_j a_j b_j        (one line per phase, j = 1..M+1)
    p g_p

Floats carry 17 significant digits so a load reproduces the stored doubles.
"""

import logging
from pathlib import Path
from typing import List, Union

from src.errors import ConstructionError, DomainError, UsageError
from src.hardfn.construction import ConstructionResult, HardFnParams
from src.hardfn.piecewise import PiecewiseQuadratic, Plateau
from src.utils.csv_utils import format_float

logger = logging.getLogger(__name__)


def dump_construction(result: ConstructionResult) -> str:
    p = result.params
    header = [format_float(v) for v in (p.G, p.beta, p.eta, p.eps)] + [str(result.M)]
    lines = [" ".join(header)]
    for j, (n_j, (a, b)) in enumerate(zip(result.checkpoints, result.phase_intervals), start=1):
        lines.append(f"{j} {n_j} {format_float(a)} {format_float(b)}")
    plateau = result.plateau
    lines.append(f"{format_float(plateau.p)} {format_float(plateau.g_p)}")
    return "\n".join(lines) + "\n"


def _fields(line: str, count: int, lineno: int) -> List[str]:
    parts = line.split()
    if len(parts) != count:
        raise UsageError(f"Line {lineno}: expected {count} fields, got {len(parts)}", token=line)
    return parts


def _number(token: str, lineno: int, kind=float):
    try:
        return kind(token)
    except ValueError:
        raise UsageError(f"Line {lineno}: cannot parse {token!r}", token=token) from None


def load_construction(text: str) -> ConstructionResult:
    """Rebuild a result from ``dump_construction`` output.

    Stored endpoints and the plateau are taken as written; whether they still describe a
    valid construction is the job of ``verify_construction``.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 3:
        raise UsageError(f"Construction text has {len(lines)} lines, need at least 3")
    head = _fields(lines[0], 5, 1)
    G, beta, eta, eps = (_number(tok, 1) for tok in head[:4])
    M = _number(head[4], 1, int)
    if len(lines) != M + 3:
        raise UsageError(f"Expected {M + 3} lines for M={M}, got {len(lines)}", token=head[4])
    try:
        params = HardFnParams(G=G, beta=beta, eta=eta, eps=eps)
    except DomainError as e:
        raise UsageError(f"Invalid parameters in header: {e}", token=lines[0]) from e

    checkpoints = []
    intervals = []
    for lineno, line in enumerate(lines[1 : M + 2], start=2):
        j, n_j, a, b = _fields(line, 4, lineno)
        if _number(j, lineno, int) != lineno - 1:
            raise UsageError(f"Line {lineno}: phase index {j} out of order", token=j)
        checkpoints.append(_number(n_j, lineno, int))
        intervals.append((_number(a, lineno), _number(b, lineno)))
    p, g_p = (_number(tok, M + 3) for tok in _fields(lines[-1], 2, M + 3))

    try:
        f_M = PiecewiseQuadratic(G, beta, intervals[:M])
        f_M_plus = f_M.with_plateau(Plateau(p=p, g_p=g_p))
    except DomainError as e:
        raise ConstructionError(f"Stored intervals do not form a valid objective: {e}") from e
    minimizer = f_M_plus.minimizer
    assert minimizer is not None
    return ConstructionResult(
        params=params,
        checkpoints=tuple(checkpoints),
        phase_intervals=tuple(intervals),
        M=M,
        f_M=f_M,
        f_M_plus=f_M_plus,
        minimizer=minimizer,
    )


def save_construction(result: ConstructionResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_construction(result), encoding="utf-8")
    logger.debug("Saved construction with M=%d to %s", result.M, path)
    return path


def read_construction(path: Union[str, Path]) -> ConstructionResult:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Failed to read construction file {path}: {e}", token=str(path)) from e
    return load_construction(text)
