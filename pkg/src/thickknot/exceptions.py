"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`KnotError`,
which is a :class:`ValueError` so that callers validating user input can catch
the built-in type.
"""


class KnotError(ValueError):
    """Base class for all package errors."""


class BadParameter(KnotError):
    """A numeric parameter is outside the operation's precondition."""


class TooFewVertices(KnotError):
    pass


class DegenerateEdge(KnotError):
    pass


class NotSimple(KnotError):
    """The polyline is not an embedded closed curve."""


class SelfIntersecting(NotSimple):
    pass


class NonconvergentSample(KnotError):
    """Two quadrature nodes coincide, so the energy sum is not finite."""


class BelowDomain(KnotError):
    """A bound was requested for a length outside the range where it holds."""


class NoSignChange(KnotError):
    pass
