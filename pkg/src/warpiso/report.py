"""Signed-deficit reports shared by the transfer and inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

OK = "ok"
HYPOTHESIS_VIOLATED = "hypothesis-violated"
ERROR = "error"

DEFAULT_EQUALITY_TOL = 1e-8


@dataclass(frozen=True)
class DeficitReport:
    case: str
    lhs: float
    rhs: float
    deficit: float
    rel_deficit: float
    passed: bool
    equality_expected: bool = False
    tol: float = DEFAULT_EQUALITY_TOL
    status: str = OK
    error_estimate: float | None = None
    details: dict = field(default_factory=dict)

    def with_details(self, **extra) -> "DeficitReport":
        return replace(self, details={**self.details, **extra})

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "deficit": self.deficit,
            "rel_deficit": self.rel_deficit,
            "status": self.status,
            "pass": self.passed,
            "equality_expected": self.equality_expected,
            "tol": self.tol,
            "error_estimate": self.error_estimate,
            "details": self.details,
        }


def relative(deficit: float, lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    if scale == 0.0:
        return 0.0
    return deficit / scale


def inequality_report(case: str, lhs: float, rhs: float, *, tol: float = DEFAULT_EQUALITY_TOL,
                      tol_ineq: float | None = None, equality_expected: bool = False,
                      status: str = OK, error_estimate: float | None = None,
                      **details) -> DeficitReport:
    """Report for ``lhs >= rhs``.

    Passes when the relative deficit is at least ``-tol_ineq`` (defaults to
    ``tol``); when equality is expected it must also be smaller than ``tol``
    in magnitude.
    """
    lhs, rhs = float(lhs), float(rhs)
    tol_ineq = tol if tol_ineq is None else tol_ineq
    deficit = lhs - rhs
    rel = relative(deficit, lhs, rhs)
    passed = rel >= -tol_ineq and (not equality_expected or abs(rel) < tol)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        passed = False
    return DeficitReport(case, lhs, rhs, deficit, rel, passed, equality_expected, tol, status,
                         error_estimate, details)


def identity_report(case: str, lhs: float, rhs: float, tol: float, *, scale: float = 0.0,
                    **details) -> DeficitReport:
    """Report for ``lhs == rhs``; the deficit is the relative gap ``|lhs - rhs| / max``.

    ``scale`` enlarges the normalisation when either side is a difference of
    larger terms.
    """
    lhs, rhs = float(lhs), float(rhs)
    gap = abs(lhs - rhs)
    rel = relative(gap, max(abs(lhs), scale), rhs)
    return DeficitReport(case, lhs, rhs, lhs - rhs, rel, rel < tol, True, tol, OK, None, details)


def error_report(case: str, message: str, **details) -> DeficitReport:
    nan = float("nan")
    return DeficitReport(case, nan, nan, nan, nan, False, False, DEFAULT_EQUALITY_TOL, ERROR, None,
                         {"error": message, **details})
