"""Exception hierarchy for polarfade."""

from __future__ import annotations

# Process exit codes used by the CLI.
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class PolarFadeError(Exception):
    """Base exception for all polarfade errors."""

    exit_code: int = 1

    def __init__(self, detail: str) -> None:
        self.detail = detail
        super().__init__(detail)


class InvalidArgumentError(PolarFadeError, ValueError):
    """Raised when an operation's precondition is violated."""

    exit_code = EXIT_USAGE


class ConfigError(PolarFadeError):
    """Raised on bad or conflicting configuration."""

    exit_code = EXIT_USAGE


class NumericError(PolarFadeError, ArithmeticError):
    """Raised when quadrature or root finding fails to converge."""

    exit_code = EXIT_NUMERIC

    def __init__(self, detail: str, abs_error: float | None = None) -> None:
        super().__init__(detail)
        self.abs_error = abs_error


class InfeasibleError(NumericError):
    """Raised when no design point satisfies the power constraints."""
