"""Structured inequality reports and their CSV / JSON-lines serialization.

The row schema is versioned and fixed so report files are diffable and
byte-reproducible across runs with the same seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DomainError

REPORT_VERSION = "ballkit-report v1"

# Fixed column order for every emitted row, report or experiment alike.
COLUMNS = (
    "name",
    "path",
    "d",
    "k",
    "l",
    "r",
    "lambda",
    "n",
    "seed",
    "trial",
    "lhs",
    "rhs",
    "stderr_lhs",
    "stderr_rhs",
    "slack",
    "pass",
    "v_p",
    "v_q",
    "theorem_applicable",
)

_PARAM_KEYS = ("d", "k", "l", "r", "lambda", "n", "seed", "trial")
_EXTRA_KEYS = ("v_p", "v_q", "theorem_applicable")


@dataclass(frozen=True)
class InequalityReport:
    """One verified inequality instance: lhs <= rhs with statistical slack.

    The pass rule allows a 3-sigma margin on both Monte-Carlo sides plus a
    1e-9 relative/absolute floor so exact paths stay tight while estimated
    paths do not raise false alarms.
    """

    name: str
    params: dict = field(default_factory=dict)
    lhs: float = 0.0
    rhs: float = 0.0
    stderr_lhs: float = 0.0
    stderr_rhs: float = 0.0
    path: str = "exact2d"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.path not in ("exact2d", "mc"):
            raise DomainError(f"path must be 'exact2d' or 'mc', got {self.path!r}")
        if self.stderr_lhs < 0 or self.stderr_rhs < 0:
            raise DomainError("standard errors must be nonnegative")
        unknown = set(self.params) - set(_PARAM_KEYS)
        if unknown:
            raise DomainError(f"unknown report parameters: {sorted(unknown)}")
        unknown = set(self.extra) - set(_EXTRA_KEYS)
        if unknown:
            raise DomainError(f"unknown report extras: {sorted(unknown)}")

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        margin = 3.0 * (self.stderr_lhs + self.stderr_rhs) + 1e-9 * max(1.0, abs(self.rhs))
        return self.lhs <= self.rhs + margin

    def to_row(self) -> dict:
        row = {c: "" for c in COLUMNS}
        row["name"] = self.name
        row["path"] = self.path
        for key in _PARAM_KEYS:
            if key in self.params:
                row[key] = self.params[key]
        row.update(
            lhs=self.lhs,
            rhs=self.rhs,
            stderr_lhs=self.stderr_lhs,
            stderr_rhs=self.stderr_rhs,
            slack=self.slack,
        )
        row["pass"] = self.passed
        for key in _EXTRA_KEYS:
            if key in self.extra:
                row[key] = self.extra[key]
        return row


def _format_cell(value) -> str:
    if value == "" or value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    lines = [f"# {REPORT_VERSION}", ",".join(COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_cell(row.get(c, "")) for c in COLUMNS))
    return "\n".join(lines) + "\n"


def rows_to_jsonl(rows: list[dict]) -> str:
    out = []
    for row in rows:
        obj = {}
        for c in COLUMNS:
            v = row.get(c, "")
            if v == "":
                continue
            obj[c] = v
        out.append(json.dumps(obj, separators=(",", ":"), allow_nan=True))
    return "\n".join(out) + "\n"


def reports_to_rows(reports) -> list[dict]:
    return [rep.to_row() for rep in reports]


def any_failures(reports) -> bool:
    return any(not rep.passed for rep in reports)
