"""Exception types raised by the simulator."""


class OiaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(OiaError, ValueError):
    """An argument violates a documented precondition."""


class NotPositiveDefiniteError(OiaError):
    """A matrix required to be positive definite has an eigenvalue below the floor."""


class IllConditionedChannelError(OiaError):
    """A channel matrix failed the rank guard; the trial should be redrawn."""


class DegenerateChannelError(OiaError):
    """A direct channel is (numerically) rank deficient; the trial should be redrawn."""


class UnsupportedGeometryError(OiaError):
    """The antenna geometry has no precoder construction (fewer receive than transmit antennas)."""


class InternalInvariantError(OiaError):
    """An internal consistency condition that should hold by construction was violated."""
