"""Utility modules."""

from .checks import CheckRecord, CheckReport, IDENTITY_TOL, INEQUALITY_SLACK
from .csv_utils import format_float, read_csv, write_csv
from .numeric import as_point, pow3, rounding_allowance
from .random_utils import make_rng, random_psd

__all__ = [
    "CheckRecord",
    "CheckReport",
    "IDENTITY_TOL",
    "INEQUALITY_SLACK",
    "format_float",
    "read_csv",
    "write_csv",
    "as_point",
    "pow3",
    "rounding_allowance",
    "make_rng",
    "random_psd",
]
