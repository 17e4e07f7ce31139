from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from feasibility.core import CertificateReport
    from feasibility.solver import SolveOutcome


class FeasibilityError(Exception):
    pass


class InputError(FeasibilityError, ValueError):
    pass


class DimensionMismatchError(InputError):
    pass


class MissingCertificateError(InputError):
    pass


class PreconditionError(InputError):
    pass


class CertificateError(InputError):
    def __init__(self, message: str, report: CertificateReport | None = None):
        super().__init__(message)
        self.report = report


class NoViolatedConstraintError(FeasibilityError):
    pass


class ScheduleExhaustedError(FeasibilityError):
    def __init__(self, message: str, outcome: SolveOutcome | Any = None):
        super().__init__(message)
        self.outcome = outcome
