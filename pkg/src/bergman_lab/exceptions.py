"""Error taxonomy shared across the package.

All errors derive from :class:`BergmanLabError` (itself a ``ValueError``) so
callers can catch everything with one except clause while tests can pin the
precise failure kind.
"""


class BergmanLabError(ValueError):
    """Base class for all package errors."""


class UsageError(BergmanLabError):
    """Malformed arguments: bad indices, under-resolved rules, bad config."""


class DomainError(BergmanLabError):
    """Evaluation requested where a field or rule is not defined."""


class PreconditionError(BergmanLabError):
    """A documented mathematical precondition does not hold for the input."""


class RefusalError(BergmanLabError):
    """Request outside a stated trust region (e.g. kernel evaluation radius)."""


class NumericError(BergmanLabError):
    """Non-finite value produced where a finite number is required."""
