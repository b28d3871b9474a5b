"""
Exception hierarchy shared by the physics modules and the CLI.

Every error carries the exit code the CLI reports for it and a context dict
naming the module and parameters that produced it.
"""

from typing import Any

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class CavityError(Exception):
    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def describe(self) -> str:
        """One-line description including the context parameters."""
        if not self.context:
            return f"{type(self).__name__}: {self.message}"
        params = ", ".join(f"{key}={value}" for key, value in sorted(self.context.items()))
        return f"{type(self).__name__}: {self.message} ({params})"


# Usage / validation


class UsageError(CavityError):
    exit_code = EXIT_USAGE


class ValidationError(CavityError):
    exit_code = EXIT_USAGE


class DeltaOutOfRange(CavityError):
    exit_code = EXIT_USAGE


class IndexOutOfRange(CavityError):
    exit_code = EXIT_USAGE


class OccupationMismatch(CavityError):
    exit_code = EXIT_USAGE


class OverflowGuard(CavityError):
    exit_code = EXIT_USAGE


# Numerical


class BracketFailure(CavityError):
    pass


class NonPositiveLowestRoot(CavityError):
    pass


class ResonanceDegeneracy(CavityError):
    pass


class ContractViolation(CavityError):
    pass


class QuadratureStall(CavityError):
    def __init__(self, message: str, report: Any = None, **context: Any):
        super().__init__(message, **context)
        self.report = report


# I/O


class OutputError(CavityError):
    exit_code = EXIT_IO
