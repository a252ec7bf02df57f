"""Exception hierarchy shared by the services, validators and the CLI."""

from typing import Any, Dict, Optional


class WishartTwError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WishartTwError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericError(WishartTwError, ArithmeticError):
    """A numerical procedure failed; ``context`` carries what it achieved."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context = dict(context or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        return f"{base} ({details})"


class QuadratureError(NumericError):
    pass


class PainleveBlowUpError(NumericError):
    pass


class FredholmConvergenceError(NumericError):
    pass


class EigenSolverError(NumericError):
    pass


class InputFileError(WishartTwError, OSError):
    """A matrix, dump or cache file could not be read."""


class VerificationFailure(WishartTwError):
    """At least one verification report ended with a failed verdict."""

    def __init__(self, message: str, failing: Optional[list] = None):
        super().__init__(message)
        self.failing = list(failing or [])


def require_finite(name: str, value: float) -> float:
    """Return ``value`` as float or raise DomainError if it is NaN/inf."""
    try:
        v = float(value)
    except (TypeError, ValueError) as e:
        raise DomainError(f"{name} must be a real number, got {value!r}") from e
    if v != v or v in (float("inf"), float("-inf")):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return v
