"""Residual certificates and the reports that collect them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One certified identity: ``residual <= threshold`` means it holds."""

    id: str
    description: str
    residual: float
    threshold: float
    anchor: str = ""

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.threshold

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "residual": float(self.residual),
            "threshold": float(self.threshold),
            "pass": self.passed,
            "anchor": self.anchor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["id"], d["description"], float(d["residual"]), float(d["threshold"]),
                   d.get("anchor", ""))


def check(id: str, description: str, residual: float, threshold: float, anchor: str = "") -> Check:
    return Check(id, description, float(residual), float(threshold), anchor)


def flag(id: str, description: str, ok: bool, anchor: str = "") -> Check:
    """A yes/no certificate encoded as residual 0 (holds) or 1 (fails)."""
    return Check(id, description, 0.0 if ok else 1.0, 0.5, anchor)


def all_passed(checks) -> bool:
    return all(c.passed for c in checks)


def failures(checks) -> list:
    return [c for c in checks if not c.passed]


REPORT_VERSION = 1


@dataclass
class Report:
    command: str
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all_passed(self.checks)

    def extend(self, checks, prefix: str = ""):
        for c in checks:
            self.checks.append(Check(prefix + c.id, c.description, c.residual, c.threshold, c.anchor)
                               if prefix else c)

    def to_dict(self) -> dict:
        out = {
            "version": REPORT_VERSION,
            "command": self.command,
            "checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.id)],
            "summary": "pass" if self.passed else "fail",
            "timings": self.timings,
            "data": self.data,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        if self.error:
            lines.append(f"  error: {self.error}")
        for c in sorted(self.checks, key=lambda c: c.id):
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.id}: residual {c.residual:.3e} <= {c.threshold:.1e}  {c.description}")
        return "\n".join(lines) + "\n"

    def emit(self, fmt: str = "json") -> bytes:
        if fmt == "json":
            return self.to_json().encode()
        if fmt == "text":
            return self.to_text().encode()
        raise ValueError(f"unknown report format {fmt!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("version") != REPORT_VERSION:
            raise ValueError(f"unsupported report version {d.get('version')!r}")
        return cls(d["command"], [Check.from_dict(c) for c in d["checks"]],
                   dict(d.get("timings", {})), dict(d.get("data", {})), d.get("error"))

    @classmethod
    def from_json(cls, text) -> "Report":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, Report):
            return NotImplemented
        return self.to_dict() == other.to_dict()
