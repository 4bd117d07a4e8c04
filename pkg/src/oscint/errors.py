"""Exception types raised across the package.

Every error derives from :class:`OscintError` (itself a ``ValueError``) so
callers can catch numeric-domain failures in one place; the CLI reports the
class name verbatim.
"""


class OscintError(ValueError):
    """Base class for all domain errors."""


class NonPositiveParameter(OscintError):
    pass


class OutOfWindow(OscintError):
    """lambda*t >= pi where a propagator-mode computation was requested."""


class OutOfRootRange(OscintError):
    """e = (lambda*eps)**2 >= 4: characteristic roots leave the unit circle."""


class IndexOutOfRange(OscintError):
    pass


class SingularMatrix(OscintError):
    pass


class CausticSingularity(OscintError):
    """sin(lambda*t) == 0, the classical path is undefined."""


class DegenerateComposition(OscintError):
    """Gaussian integral with a vanishing quadratic coefficient."""


class DimensionMismatch(OscintError):
    pass


class NonNormalizableState(OscintError):
    pass


class DenseLimitExceeded(OscintError):
    """Dense oracle requested above the configured matrix size."""


class EmitError(OscintError):
    """Table could not be serialized or written."""


class EndpointMismatch(OscintError):
    """Supplied path does not start at q0 and end at q."""
