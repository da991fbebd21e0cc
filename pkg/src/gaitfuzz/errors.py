"""Exception types shared across the package."""


class GaitfuzzError(Exception):
    """Base class for all package errors."""


class InvalidInputError(GaitfuzzError):
    """A caller supplied a non-finite or missing input value."""


class ConfigurationError(GaitfuzzError):
    """A controller, variable, or anchor definition violates an invariant."""


class RuleGapError(GaitfuzzError):
    """No rule fired with positive strength at the given input point."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class GeometryError(GaitfuzzError):
    """Degenerate geometry (coincident points, zero-length segments)."""


class ReachError(GaitfuzzError):
    """A foot target lies outside the reachable workspace of the leg.

    ``shortfall`` is the gap in meters between the required and available
    reach.
    """

    def __init__(self, message: str, shortfall: float = 0.0):
        super().__init__(message)
        self.shortfall = shortfall


class EmptyCycleError(GaitfuzzError):
    """A recording contained no completed gait cycle."""
