"""Experiment configuration: per-command schemas, config files, environment and flags."""

import argparse
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, NoReturn, Optional, Sequence, Tuple

from src.errors import UsageError
from src.uniform.losses import MAX_SAMPLES

logger = logging.getLogger(__name__)

ENV_PREFIX = "NAGLAB_"

COMMANDS = ("construct", "diverge", "verify", "uniform", "quadnorm", "variants", "figure2")

# key -> (parser, default); a None default means "derive from the other parameters"
Schema = Dict[str, Tuple[Callable[[str], Any], Any]]

_HARD_FN: Schema = {
    "G": (float, 1.0),
    "beta": (float, 1.0),
    "eta": (float, 0.5),
    "eps": (float, 1e-6),
}

SCHEMAS: Dict[str, Schema] = {
    "construct": {**_HARD_FN, "out_path": (Path, None), "report_path": (Path, None)},
    "diverge": {
        **_HARD_FN,
        "T": (int, None),
        "construction": (Path, None),
        "out_path": (Path, None),
        "report_path": (Path, None),
    },
    "verify": {
        **_HARD_FN,
        "T": (int, 200),
        "trials": (int, 20),
        "seed": (int, 0),
        "construction": (Path, None),
        "report_path": (Path, None),
    },
    "uniform": {
        "G": (float, 1.0),
        "beta": (float, 1.0),
        "eta": (float, 1.0),
        "n": (int, 10),
        "T": (int, None),
        "out_path": (Path, None),
        "report_path": (Path, None),
    },
    "quadnorm": {
        "T": (int, 100),
        "trials": (int, 100),
        "seed": (int, 0),
        "out_path": (Path, None),
        "report_path": (Path, None),
    },
    "variants": {
        "beta": (float, 1.0),
        "T": (int, 100),
        "trials": (int, 20),
        "seed": (int, 0),
        "report_path": (Path, None),
    },
    "figure2": {
        **_HARD_FN,
        "T": (int, None),
        "construction": (Path, None),
        "out_path": (Path, None),
        "report_path": (Path, None),
    },
}

# commands whose horizon must be at least one step
_POSITIVE_T = ("uniform", "quadnorm", "variants", "verify")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: Mapping[str, Any] = field(default_factory=dict)
    sources: Mapping[str, str] = field(default_factory=dict)
    debug: bool = False
    quiet: bool = False

    def __getitem__(self, key: str) -> Any:
        return self.params[key]

    def get(self, key: str, default: Any = None) -> Any:
        value = self.params.get(key)
        return default if value is None else value

    def echo(self) -> List[str]:
        """``key = value  (source)`` lines, in schema order."""
        return [
            f"{key} = {'auto' if value is None else value}  ({self.sources.get(key, 'default')})"
            for key, value in self.params.items()
        ]


class LabArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str) -> NoReturn:
        token = None
        if "unrecognized arguments:" in message:
            token = message.split("unrecognized arguments:", 1)[1].strip()
        elif "invalid choice:" in message:
            token = message.split("invalid choice:", 1)[1].split("(", 1)[0].strip().strip("'")
        raise UsageError(message, token)


def build_parser() -> LabArgumentParser:
    parser = LabArgumentParser(
        prog="nag-lab", description="Stability experiments for Nesterov's accelerated gradient"
    )
    parser.add_argument("--debug", action="store_true", help="log at DEBUG level")
    parser.add_argument("--quiet", action="store_true", help="log warnings only")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True
    for command, schema in SCHEMAS.items():
        sub = commands.add_parser(command, help=f"run the {command} experiment")
        sub.add_argument("--config", type=str, default=None, help="flat key = value file")
        sub.add_argument("--debug", action="store_true", default=argparse.SUPPRESS)
        sub.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
        for key in schema:
            flag = "--" + key.replace("_", "-")
            sub.add_argument(flag, dest=key, type=str, default=None, metavar=key.upper())
    return parser


def _convert(command: str, key: str, raw: str) -> Any:
    schema = SCHEMAS[command]
    if key not in schema:
        raise UsageError(f"Unknown key '{key}' for command '{command}'", key)
    kind = schema[key][0]
    text = raw.strip()
    try:
        if kind is int:
            value = float(text)
            if not value.is_integer():
                raise ValueError(text)
            return int(value)
        return kind(text)
    except ValueError as e:
        raise UsageError(f"Failed to parse {key} = {raw!r}: {e}", raw) from e


def read_config_file(path: Path) -> Dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Failed to read config file {path}: {e}", str(path)) from e
    values: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {line!r}", line)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise UsageError(f"{path}:{lineno}: missing key", line)
        values[key] = value
    return values


def validate(command: str, params: Mapping[str, Any]) -> None:
    """Cross-field checks, before any computation."""

    def reject(message: str, key: str) -> NoReturn:
        raise UsageError(message, f"{key}={params[key]}")

    for key in ("G", "beta"):
        if key in params and not params[key] > 0:
            reject(f"{key} must be positive, got {params[key]}", key)
    if "eta" in params:
        if not params["eta"] > 0:
            reject(f"eta must be positive, got {params['eta']}", "eta")
        if "beta" in params and params["eta"] * params["beta"] > 1.0:
            reject(f"need eta <= 1/beta = {1.0 / params['beta']!r}, got {params['eta']}", "eta")
    if "eps" in params:
        limit = params["G"] / (2.0 * params["beta"])
        if not 0 < params["eps"] < limit:
            reject(f"need 0 < eps < G/(2 beta) = {limit!r}, got {params['eps']}", "eps")
    if command == "uniform" and not 4 <= params["n"] <= MAX_SAMPLES:
        reject(f"n must lie in [4, {MAX_SAMPLES}], got {params['n']}", "n")
    T = params.get("T")
    if T is not None:
        low = 1 if command in _POSITIVE_T else 0
        if T < low:
            reject(f"T must be >= {low}, got {T}", "T")
    if "trials" in params and params["trials"] < 1:
        reject(f"trials must be >= 1, got {params['trials']}", "trials")
    if "seed" in params and params["seed"] < 0:
        reject(f"seed must be >= 0, got {params['seed']}", "seed")


def parse_config(
    argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None
) -> ExperimentConfig:
    """defaults < config file < NAGLAB_<KEY> environment variables < flags."""
    args = build_parser().parse_args(argv)
    command: str = args.command
    schema = SCHEMAS[command]
    environ = os.environ if environ is None else environ

    params: Dict[str, Any] = {key: default for key, (_, default) in schema.items()}
    sources: Dict[str, str] = {}
    layers: List[Tuple[str, Mapping[str, str]]] = []
    if args.config is not None:
        layers.append((f"file {args.config}", read_config_file(Path(args.config))))
    env = {
        key: environ[ENV_PREFIX + key.upper()]
        for key in schema
        if ENV_PREFIX + key.upper() in environ
    }
    layers.append(("environment", env))
    flags = {key: getattr(args, key) for key in schema if getattr(args, key, None) is not None}
    layers.append(("flag", flags))

    for source, values in layers:
        for key, raw in values.items():
            params[key] = _convert(command, key, raw)
            sources[key] = source
    validate(command, params)
    config = ExperimentConfig(
        command=command,
        params=params,
        sources=sources,
        debug=bool(getattr(args, "debug", False)),
        quiet=bool(getattr(args, "quiet", False)),
    )
    logger.debug("Resolved config for %s: %s", command, dict(params))
    return config
