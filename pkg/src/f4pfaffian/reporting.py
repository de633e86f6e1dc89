"""Structured pass/fail reports shared by all verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """Outcome of one verification, with a witness string on failure."""

    check_id: str
    statement: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.check_id,
            "anchor": self.statement,
            "pass": self.passed,
            "detail": self.detail,
        }


@dataclass
class ReportSet:
    """Aggregate of check results, in registry order."""

    results: list[CheckResult] = field(default_factory=list)

    def add(self, result: CheckResult) -> None:
        self.results.append(result)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        passed = sum(1 for r in self.results if r.passed)
        return {
            "checks": [r.to_json() for r in self.results],
            "summary": {"passed": passed, "failed": len(self.results) - passed},
        }
