"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: user-facing input problems exit 1,
numeric and integrity failures exit 2.
"""


class PrimeChaosError(Exception):
    """Base class for all package errors."""


class DomainError(PrimeChaosError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InsufficientSpanError(DomainError):
    """Sequence span too short for the requested window length."""


class InsufficientDataError(DomainError):
    """Too few data points for a fit or estimate."""


class ParseError(PrimeChaosError, ValueError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.path = path


class NumericError(PrimeChaosError, ArithmeticError):
    """Numerical routine failed to converge."""


class IntegrityError(PrimeChaosError):
    """Stored data (e.g. a prime-count checkpoint) failed verification."""


class LongRunError(DomainError):
    """A run beyond desk scale was requested without opting in."""
