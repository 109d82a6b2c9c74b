"""Pass/fail records collected by the verifiers."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List

from src.errors import CheckFailure
from src.utils.csv_utils import format_float

logger = logging.getLogger(__name__)

# favorable-side relative slack for inequalities
INEQUALITY_SLACK = 1e-12
# identities that hold exactly in real arithmetic
IDENTITY_TOL = 1e-9

REPORT_HEADER = ["check_name", "status", "observed", "required"]


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    observed: float
    required: float
    context: Dict[str, Any] = field(default_factory=dict)
    informational: bool = False

    @property
    def status(self) -> str:
        if self.informational:
            return "info"
        return "pass" if self.passed else "fail"

    def to_row(self) -> List[str]:
        return [self.name, self.status, format_float(self.observed), format_float(self.required)]

    def __str__(self):
        details = " ".join(f"{k}={v}" for k, v in self.context.items())
        text = (
            f"{self.status.upper():4} {self.name}: "
            f"observed={self.observed:.6g} required={self.required:.6g}"
        )
        return f"{text} {details}".rstrip()


@dataclass
class CheckReport:
    records: List[CheckRecord] = field(default_factory=list)

    def add(
        self,
        name: str,
        passed: bool,
        observed: float,
        required: float,
        informational: bool = False,
        **context: Any,
    ) -> CheckRecord:
        record = CheckRecord(
            name=name,
            passed=bool(passed) or informational,
            observed=float(observed),
            required=float(required),
            context=dict(context),
            informational=informational,
        )
        if not record.passed:
            logger.warning("%s", record)
        else:
            logger.debug("%s", record)
        self.records.append(record)
        return record

    def at_least(
        self,
        name: str,
        observed: float,
        required: float,
        slack: float = INEQUALITY_SLACK,
        allowance: float = 0.0,
        **context: Any,
    ) -> bool:
        """Record ``observed >= required`` with slack only on the favorable side."""
        limit = required - slack * abs(required) - allowance
        return self.add(name, observed >= limit, observed, required, **context).passed

    def at_most(
        self,
        name: str,
        observed: float,
        required: float,
        slack: float = INEQUALITY_SLACK,
        allowance: float = 0.0,
        **context: Any,
    ) -> bool:
        limit = required + slack * abs(required) + allowance
        return self.add(name, observed <= limit, observed, required, **context).passed

    def close(
        self,
        name: str,
        deviation: float,
        magnitude: float,
        tol: float = IDENTITY_TOL,
        allowance: float = 0.0,
        **context: Any,
    ) -> bool:
        """Record ``deviation <= tol * magnitude + allowance``; observed is the deviation."""
        limit = tol * abs(magnitude) + allowance
        return self.add(name, deviation <= limit, deviation, limit, **context).passed

    def info(self, name: str, observed: float, required: float = float("nan"), **context: Any):
        self.add(name, True, observed, required, informational=True, **context)

    def extend(self, other: "CheckReport") -> "CheckReport":
        self.records.extend(other.records)
        return self

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def named(self, prefix: str) -> List[CheckRecord]:
        return [r for r in self.records if r.name.startswith(prefix)]

    def raise_for_failures(self) -> None:
        failures = self.failures
        if failures:
            first = failures[0]
            raise CheckFailure(first.name, first.observed, first.required, **first.context)

    def rows(self) -> List[List[str]]:
        return [r.to_row() for r in self.records]

    def summary(self) -> str:
        checked = [r for r in self.records if not r.informational]
        failed = len(self.failures)
        lines = [f"{len(checked) - failed}/{len(checked)} checks passed"]
        lines.extend(str(r) for r in self.failures)
        return "\n".join(lines)

    def __iter__(self) -> Iterator[CheckRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)
