"""
Error types raised by the walk engines.
Management commands map them onto process exit codes.
"""


class WalkError(Exception):
    """Base class for every engine error."""


class InvalidArgument(WalkError, ValueError):
    """A parameter lies outside the domain an operation accepts."""


class RegimeViolation(InvalidArgument):
    """A small-p analysis was asked for a grid with pT above the first-order limit."""


class CapacityExceeded(WalkError):
    """A step would move amplitude beyond the stored lattice."""


class NumericalCorruption(WalkError):
    """A density matrix diagonal went negative beyond roundoff."""


class FitFailure(WalkError):
    """A least-squares design matrix is rank deficient."""
