"""
Error hierarchy, exit codes and problem reports for the CLI.

Failures are reported in a Problem Details shape on stderr:

{
    "type": "hypersurf:errors/duplicate-curve",
    "title": "Duplicate Curve",
    "exit_code": 2,
    "detail": "FIBER_H(1) appears in levels 1 and 2",
    "run_id": "3f9c0d1e2a4b",
    "timestamp": "2026-01-01T12:00:00+00:00"
}

Outside development, details of unexpected errors are replaced by a generic
message so tracebacks never reach the report stream.
"""

import logging
from datetime import datetime, timezone
from typing import Optional

from pydantic import BaseModel, ConfigDict

from hypersurf.core.config import settings
from hypersurf.core.logging import get_run_id

logger = logging.getLogger(__name__)

ERROR_TYPE_BASE = "hypersurf:errors"

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_SPEC_VALIDATION = 2
EXIT_INTERNAL_CONSISTENCY = 3


class HypersurfError(Exception):
    """Base exception for all library errors."""

    error_code = "hypersurf-error"
    title = "Hypersurf Error"
    exit_code = EXIT_UNEXPECTED


class StructuralError(HypersurfError):
    """Shape mismatch: lattice rank, sequence index out of range."""

    error_code = "structural-error"
    title = "Structural Error"
    exit_code = EXIT_SPEC_VALIDATION


class DomainError(HypersurfError):
    """Arithmetic precondition violated (gcd, range, integrality)."""

    error_code = "domain-error"
    title = "Domain Error"
    exit_code = EXIT_SPEC_VALIDATION


class SpecValidationError(HypersurfError):
    """A tower specification violates one of its invariants."""

    error_code = "spec-validation"
    title = "Spec Validation Failed"
    exit_code = EXIT_SPEC_VALIDATION


class DuplicateCurveError(SpecValidationError):
    """The same curve is declared twice across the tower."""

    error_code = "duplicate-curve"
    title = "Duplicate Curve"


class NonIntegralClassError(SpecValidationError):
    """A level's weighted branch class is not m times an integral class."""

    error_code = "non-integral-class"
    title = "Non-Integral Class"


class NonIntegralBranchError(SpecValidationError):
    """A branch curve is not integral for the chosen symmetric differential."""

    error_code = "non-integral-branch"
    title = "Branch Curve Not Omega-Integral"


class MultiplicityError(SpecValidationError):
    """A branch multiplicity is out of range or not coprime to the degree."""

    error_code = "multiplicity"
    title = "Invalid Multiplicity"


class SNCViolationError(SpecValidationError):
    """The branch divisor is not simple normal crossings."""

    error_code = "snc-violation"
    title = "SNC Violation"


class UnsupportedGeometryError(SpecValidationError):
    """The geometry cannot be decided exactly by the built-in families."""

    error_code = "unsupported-geometry"
    title = "Unsupported Geometry"


class SpecParseError(SpecValidationError):
    """A specification document could not be read or parsed."""

    error_code = "spec-parse"
    title = "Spec Parse Error"


class InternalConsistencyError(HypersurfError):
    """Two independent derivations of the same quantity disagree."""

    error_code = "internal-consistency"
    title = "Internal Consistency Failure"
    exit_code = EXIT_INTERNAL_CONSISTENCY


class ProblemDetail(BaseModel):
    """Problem report emitted on stderr when a command fails."""

    type: str
    title: str
    exit_code: int
    detail: Optional[str] = None
    run_id: Optional[str] = None
    timestamp: Optional[str] = None

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "type": "hypersurf:errors/non-integral-class",
                "title": "Non-Integral Class",
                "exit_code": 2,
                "detail": "level 1: weighted branch class (3, 2) is not 2 * integral",
                "run_id": "3f9c0d1e2a4b",
                "timestamp": "2026-01-01T12:00:00+00:00",
            }
        }
    )


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to the process exit status.

    Args:
        exc: The exception that ended the command

    Returns:
        2 for specification problems, 3 for internal consistency failures,
        1 for anything unexpected
    """
    if isinstance(exc, HypersurfError):
        return exc.exit_code
    return EXIT_UNEXPECTED


def sanitize_error_message(exc: BaseException, is_development: bool = False) -> str:
    """
    Produce the detail line for a problem report.

    Library errors carry messages written for users and are always shown.
    Unexpected errors only expose their message in development.
    """
    if isinstance(exc, HypersurfError) or is_development:
        return str(exc) or type(exc).__name__
    return "Unexpected internal error. Re-run with HYPERSURF_ENVIRONMENT=development."


def create_problem_detail(exc: BaseException) -> ProblemDetail:
    """
    Build the problem report for an exception.

    Args:
        exc: The exception that ended the command

    Returns:
        ProblemDetail model
    """
    if isinstance(exc, HypersurfError):
        slug, title = exc.error_code, exc.title
    else:
        slug, title = "unexpected-error", "Unexpected Error"

    return ProblemDetail(
        type=f"{ERROR_TYPE_BASE}/{slug}",
        title=title,
        exit_code=exit_code_for(exc),
        detail=sanitize_error_message(exc, settings.is_development),
        run_id=get_run_id() or None,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


__all__ = [
    "EXIT_INTERNAL_CONSISTENCY",
    "EXIT_OK",
    "EXIT_SPEC_VALIDATION",
    "EXIT_UNEXPECTED",
    "DomainError",
    "DuplicateCurveError",
    "HypersurfError",
    "InternalConsistencyError",
    "MultiplicityError",
    "NonIntegralBranchError",
    "NonIntegralClassError",
    "ProblemDetail",
    "SNCViolationError",
    "SpecParseError",
    "SpecValidationError",
    "StructuralError",
    "UnsupportedGeometryError",
    "create_problem_detail",
    "exit_code_for",
    "sanitize_error_message",
]
