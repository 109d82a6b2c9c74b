"""Command-line experiment runner."""

from .config import COMMANDS, SCHEMAS, ExperimentConfig, build_parser, parse_config
from .runner import RunRecord, main, run

__all__ = [
    "COMMANDS",
    "SCHEMAS",
    "ExperimentConfig",
    "build_parser",
    "parse_config",
    "RunRecord",
    "main",
    "run",
]
