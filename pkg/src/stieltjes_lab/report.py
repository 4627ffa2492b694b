"""Verification reports: one case per checked identity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any


@dataclass
class Case:
    id: str
    inputs: dict
    metric: str
    value: float
    tolerance: float
    strict: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        return self.value < self.tolerance if self.strict else self.value <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "inputs": self.inputs,
            "metric": self.metric,
            "value": _jsonable(self.value),
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class VerificationReport:
    suite: str
    cases: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, id: str, value: float, tolerance: float, *, metric: str = "max_rel_error",
            inputs: dict | None = None, strict: bool = False) -> Case:
        case = Case(id, dict(inputs or {}), metric, float(value), float(tolerance), strict)
        self.cases.append(case)
        return case

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.cases.extend(other.cases)
        self.notes.extend(other.notes)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def max_error(self) -> float:
        return max((c.value for c in self.cases), default=0.0)

    def case(self, id: str) -> Case:
        for c in self.cases:
            if c.id == id:
                return c
        raise KeyError(id)

    def to_dict(self, timestamp: str | None = None) -> dict:
        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        out: dict[str, Any] = {
            "suite": self.suite,
            "timestamp": timestamp,
            "config": self.config,
            "cases": [c.to_dict() for c in self.cases],
            "max_error": _jsonable(self.max_error),
            "pass": self.passed,
        }
        if self.grid:
            out["grid"] = self.grid
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _jsonable(x: float):
    if math.isfinite(x):
        return x
    return str(x)
