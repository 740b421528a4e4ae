"""Exception hierarchy shared by every module.

The CLI maps these onto its exit codes: :class:`UsageError` is 1,
:class:`UnsupportedError` and :class:`ResourceError` are 2 and
:class:`InvariantViolation` is 3.
"""


class GapfieldError(Exception):
    """Base class for all errors raised by the package."""


class UsageError(GapfieldError, ValueError):
    """Malformed input: bad grammar, missing fields, inconsistent arguments."""


class DimensionError(UsageError):
    """Matrix or vector shapes that do not fit together."""


class DomainError(UsageError):
    """An argument outside the mathematical domain (zero target, zero polynomial)."""


class ResourceError(GapfieldError):
    """An enumeration or work cap was exceeded."""


class UnsupportedError(GapfieldError):
    """A valid request that this implementation deliberately refuses."""


class InvariantViolation(GapfieldError, AssertionError):
    """An exact post-condition failed. Always a bug or a broken precondition."""
