"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so new error types should
subclass one of the three leaves below rather than raising bare ValueError.
"""

from __future__ import annotations


class QdetError(Exception):
    """Base class for all package errors."""


class ValidationError(QdetError):
    """Bad input: wrong shape, non-finite entries, violated preconditions."""


class MatrixParseError(ValidationError):
    """Matrix file or generator spec could not be parsed."""


class StateTooLargeError(QdetError):
    """Requested register layout exceeds the configured qubit cap."""


class VerificationError(QdetError):
    """A self-check failed: oracle disagreement or inconsistent measurements."""
