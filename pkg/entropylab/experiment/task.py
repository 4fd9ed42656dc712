"""A single configured check and its execution state."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from entropylab.experiment.spec import CheckSpec
from entropylab.lab.reports import ConcentrationProfile, InequalityReport


class TaskStatus(str, Enum):
    """Check execution status."""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class CheckResult:
    """What a runner hands back: reports plus any profiles to plot."""

    reports: List[InequalityReport] = field(default_factory=list)
    profiles: List[ConcentrationProfile] = field(default_factory=list)


@dataclass
class CheckTask:
    """One entry of an experiment's ``checks`` list."""

    index: int
    spec: CheckSpec
    status: TaskStatus = TaskStatus.PENDING
    result: CheckResult = field(default_factory=CheckResult)
    error: Optional[str] = None
    seconds: float = 0.0

    @property
    def name(self) -> str:
        return self.spec.label or self.spec.check

    @property
    def satisfied(self) -> bool:
        return self.status == TaskStatus.COMPLETED and all(r.satisfied for r in self.result.reports)

    def mark_running(self) -> None:
        self.status = TaskStatus.RUNNING

    def mark_completed(self, result: CheckResult) -> None:
        self.status = TaskStatus.COMPLETED
        self.result = result

    def mark_failed(self, error: str, report: InequalityReport) -> None:
        """Failed checks still leave one (unsatisfied) report behind."""
        self.status = TaskStatus.FAILED
        self.error = error
        self.result = CheckResult(reports=[report])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "name": self.name,
            "check": self.spec.check,
            "status": self.status.value,
            "reports": len(self.result.reports),
            "satisfied": self.satisfied,
            "error": self.error,
            "seconds": round(self.seconds, 3),
        }

    def __repr__(self) -> str:
        return f"CheckTask(index={self.index}, name={self.name!r}, status={self.status.value})"
