"""Verdict records produced by the inequality checks."""

from __future__ import annotations

from math import nan
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from entropylab.core.config import get_settings
from entropylab.estimators.estimate import combined_se


class ReportSide(BaseModel):
    """One inequality ``lhs <= rhs`` with its statistical slack."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    name: str
    lhs: float
    rhs: float
    lhs_se: float = 0.0
    rhs_se: float = 0.0
    margin: float
    slack: float
    satisfied: bool


class InequalityReport(BaseModel):
    """A verified inequality instance: satisfied ⇔ margin >= -slack.

    Two-sided checks put the non-trivial side in ``lhs``/``rhs`` and every
    other side in ``sides``; the report is satisfied only if all are.
    """

    model_config = ConfigDict(ser_json_inf_nan="constants")

    name: str
    lhs: float
    rhs: float
    lhs_se: float = 0.0
    rhs_se: float = 0.0
    margin: float
    slack: float
    satisfied: bool
    params: Dict[str, Any] = Field(default_factory=dict)
    sides: List[ReportSide] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None

    def recompute_satisfied(self) -> bool:
        """Verdict rebuilt from the serialised numbers alone."""
        if self.error is not None:
            return False
        return self.margin >= -self.slack and all(s.margin >= -s.slack for s in self.sides)


def slack_for(*errors: float, slack: Optional[float] = None) -> float:
    """3 combined SE, or the analytic slack when every error is zero."""
    if slack is not None:
        return slack
    cfg = get_settings()
    se = combined_se(*errors)
    return cfg.analytic_slack if se == 0.0 else cfg.slack_sigmas * se


def side(
    name: str,
    lhs: float,
    rhs: float,
    lhs_se: float = 0.0,
    rhs_se: float = 0.0,
    slack: Optional[float] = None,
) -> ReportSide:
    margin = float(rhs - lhs)
    s = slack_for(lhs_se, rhs_se, slack=slack)
    return ReportSide(
        name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        lhs_se=float(lhs_se),
        rhs_se=float(rhs_se),
        margin=margin,
        slack=s,
        satisfied=bool(margin >= -s),
    )


def make_report(
    name: str,
    lhs: float,
    rhs: float,
    lhs_se: float = 0.0,
    rhs_se: float = 0.0,
    params: Optional[Dict[str, Any]] = None,
    sides: Optional[List[ReportSide]] = None,
    details: Optional[Dict[str, Any]] = None,
    slack: Optional[float] = None,
) -> InequalityReport:
    primary = side(name, lhs, rhs, lhs_se, rhs_se, slack=slack)
    sides = sides or []
    return InequalityReport(
        name=name,
        lhs=primary.lhs,
        rhs=primary.rhs,
        lhs_se=primary.lhs_se,
        rhs_se=primary.rhs_se,
        margin=primary.margin,
        slack=primary.slack,
        satisfied=primary.satisfied and all(s.satisfied for s in sides),
        params=params or {},
        sides=sides,
        details=details or {},
    )


def failed_report(name: str, error: str, params: Optional[Dict[str, Any]] = None) -> InequalityReport:
    return InequalityReport(
        name=name,
        lhs=nan,
        rhs=nan,
        margin=nan,
        slack=0.0,
        satisfied=False,
        params=params or {},
        error=error,
    )


class ConcentrationProfile(BaseModel):
    """Tails P{|h̃/n - h/n| >= ε} against 4 exp(-ε² n / 16)."""

    model: str
    n: int
    m: int
    entropy: float
    entropy_method: str
    eps_grid: List[float]
    empirical_tail: List[float]
    tail_se: List[float]
    tail_bound: List[float]
    oracle_tail: Optional[List[float]] = None
    bound_ratio: List[float] = Field(default_factory=list)


class StageRecord(BaseModel):
    """One intermediate step of the reverse-EPI pipeline."""

    stage: str
    values: Dict[str, Any] = Field(default_factory=dict)


class HyperplaneRow(BaseModel):
    """D(f)/n for one model next to the ¼ log n + c ceiling."""

    name: str
    n: int
    d_per_n: float
    d_per_n_se: float
    bound: float
    independence_per_n: Optional[float] = None
    independence_per_n_se: Optional[float] = None
    method: str
    flagged: bool
