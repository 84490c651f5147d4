"""Exception hierarchy shared by the library modules and the CLI.

Library code raises these; the command-line front end maps them onto its
documented exit codes through `exit_code_for`.
"""
from __future__ import annotations

from enum import IntEnum


class ExitCode(IntEnum):
    OK = 0
    CHECK_FAILED = 1
    PARSE = 2
    DIMENSION = 3
    BAD_STEP = 4
    UNSUPPORTED_DIM = 5


class NonexError(Exception):
    """Base class for every error raised by this package."""

    exit_code = ExitCode.PARSE


class RationalParseError(NonexError, ValueError):
    """Raised when a rational/decimal string cannot be read exactly."""

    exit_code = ExitCode.PARSE


class DimensionMismatchError(NonexError, ValueError):
    """Raised when two objects that must share a dimension do not."""

    exit_code = ExitCode.DIMENSION


class PreconditionError(NonexError, ValueError):
    """Raised when a parameter is outside the range an operation accepts."""

    exit_code = ExitCode.PARSE


class InvalidStructureError(NonexError, ValueError):
    """Raised when a shuffle structure is used without passing validation."""

    exit_code = ExitCode.PARSE


class GridStepError(NonexError, ValueError):
    """Raised for a grid step that is not 1/m with (d+1) | m."""

    exit_code = ExitCode.BAD_STEP


class UnsupportedDimensionError(NonexError, ValueError):
    """Raised when a command only supports certain dimensions."""

    exit_code = ExitCode.UNSUPPORTED_DIM


def exit_code_for(exc: BaseException) -> ExitCode:
    """Return the CLI exit code for an exception (PARSE for unknown errors)."""
    if isinstance(exc, NonexError):
        return exc.exit_code
    return ExitCode.PARSE
