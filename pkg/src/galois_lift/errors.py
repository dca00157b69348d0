"""Exception hierarchy and search-size limits."""

import os


class GaloisLiftError(Exception):
    """Base class for every error raised by the package."""


class PreconditionError(GaloisLiftError, ValueError):
    """Input violates a documented pre-condition.

    ``violations`` carries machine-readable details (the CLI turns them into
    an exit-2 report).
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class EigenvalueOutsideField(PreconditionError):
    pass


class OrbitNotClosed(PreconditionError):
    pass


class SearchLimitExceeded(PreconditionError):
    pass


class InternalDefect(GaloisLiftError, RuntimeError):
    """A step that the theory guarantees to succeed has failed.

    ``residual`` holds whatever data is needed to reproduce the failure.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class HenselDefect(InternalDefect):
    pass


DEFAULT_MAX_EXHAUSTIVE = 100_000


def max_exhaustive():
    """Cap on exhaustive oracle searches, overridable by GALOIS_LIFT_MAX_EXHAUSTIVE."""
    raw = os.environ.get("GALOIS_LIFT_MAX_EXHAUSTIVE")
    if raw is None:
        return DEFAULT_MAX_EXHAUSTIVE
    return int(raw)
