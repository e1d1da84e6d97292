"""Pass/fail reports shared by the verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
  name: str
  cases_checked: int = 0
  failures: list[dict[str, Any]] = field(default_factory=list)
  details: dict[str, Any] = field(default_factory=dict)

  # Witness lists can get huge when a weight table is wrong
  MAX_FAILURES = 50

  @property
  def passed(self) -> bool:
    return not self.failures

  def fail(self, witness: dict[str, Any]) -> None:
    if len(self.failures) < self.MAX_FAILURES:
      self.failures.append(witness)
    self.details["failure_count"] = self.details.get("failure_count", 0) + 1

  def merge(self, other: CheckReport) -> None:
    self.cases_checked += other.cases_checked
    room = self.MAX_FAILURES - len(self.failures)
    self.failures.extend(other.failures[:max(room, 0)])
    count = other.details.get("failure_count", 0)
    if count:
      self.details["failure_count"] = self.details.get("failure_count", 0) + count

  def to_json(self) -> dict[str, Any]:
    return {
      "name": self.name,
      "passed": self.passed,
      "cases_checked": self.cases_checked,
      "failures": self.failures,
      "details": self.details,
    }
