"""
Exception hierarchy shared by the kernel, the iteration engine and the CLI.
"""
from typing import Optional


class SemiflowError(Exception):
    """Base class for every error raised by semiflow."""


class DimensionMismatch(SemiflowError, ValueError):
    """Operands do not conform."""


class InvalidMatrix(SemiflowError, ValueError):
    """Matrix input is empty, not 2-D or holds non-finite entries."""


class SingularMatrix(SemiflowError):
    """Reciprocal condition estimate fell below the singularity threshold."""

    def __init__(self, rcond: float, message: Optional[str] = None):
        self.rcond = rcond
        super().__init__(message or f"matrix is numerically singular (rcond={rcond:.3e})")


class EigenFailure(SemiflowError):
    """Dense eigenvalue or singular value routine did not converge."""


class Breakdown(SemiflowError):
    """A semigroup operator could not be applied because its Δ is singular."""

    def __init__(self, operator: str, cause: Optional[SingularMatrix] = None, message: Optional[str] = None):
        self.operator = operator
        self.cause = cause
        detail = message or (str(cause) if cause else "singular Δ")
        super().__init__(f"{operator} operator broke down: {detail}")


class DegenerateCoefficient(SemiflowError, ValueError):
    """Linear coefficient recursion hit a_k = 1."""


class InsufficientData(SemiflowError, ValueError):
    """Too few usable residuals to estimate a convergence order."""


class NotDecreasing(SemiflowError, ValueError):
    """Residual sequence is not strictly decreasing."""


class PreconditionViolation(SemiflowError):
    """Problem data violates a solver precondition."""


class RankAmbiguity(SemiflowError):
    """Singular value gap is too small to fix the null-space dimension."""


class SingularIterate(SemiflowError):
    """An iterate became numerically singular where it must be inverted."""


class ProblemFileError(SemiflowError):
    """Problem file is malformed; `field` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
