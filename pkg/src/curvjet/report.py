"""Structured, deterministic reports for the check suites.

One record per check with its residual and threshold; the summary verdict is
the conjunction.  Bodies carry no timestamps so identical configurations
produce byte-identical documents that CI can diff across commits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import __version__

__all__ = ["CheckRecord", "Report"]


@dataclass(frozen=True)
class CheckRecord:
    """A single named check: pass iff residual <= threshold."""

    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.threshold

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "threshold": self.threshold,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class Report:
    """Record list plus the configuration that produced it."""

    records: tuple[CheckRecord, ...]
    config: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {
            "version": __version__,
            "config": self.config,
            "checks": [r.to_dict() for r in self.records],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render_text(self) -> str:
        lines = []
        for r in self.records:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"{mark}  {r.name}  residual {r.residual:.3e}  (<= {r.threshold:.1e})")
        lines.append(f"summary: {'PASS' if self.passed else 'FAIL'} ({len(self.records)} checks)")
        return "\n".join(lines) + "\n"
