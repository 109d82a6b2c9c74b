"""CSV output with round-trip-exact float formatting."""

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

Cell = Union[str, int, float]


def format_float(value: float) -> str:
    """17 significant digits, enough to read back the identical double."""
    return f"{float(value):.17g}"


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_csv(
    path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Cell]]
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
            count += 1
    logger.debug("Wrote %d rows to %s", count, path)
    return path


def read_csv(path: Union[str, Path]) -> Tuple[List[str], List[List[str]]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        rows = list(reader)
    if not rows:
        return [], []
    return rows[0], rows[1:]
