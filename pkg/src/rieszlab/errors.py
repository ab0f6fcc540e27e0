"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so the CLI can map
them to exit status 1; configuration problems derive from
:class:`ConfigError` (exit status 2).
"""


class RieszLabError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(RieszLabError):
    pass


class ConfigError(RieszLabError, ValueError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class NegativeQuadraticForm(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class SearchDiverged(NumericalError):
    pass


class VerificationFailed(NumericalError):
    pass


class InsufficientCoefficients(RieszLabError, ValueError):
    pass


class DomainError(RieszLabError, ValueError):
    pass


class InvalidWeight(ConfigError):
    pass


class Unsupported(RieszLabError):
    pass


class NotFast(RieszLabError, ValueError):
    """The multiplier sequence fails the fast-decay condition on its tail."""


class NotEquivalent(RieszLabError):
    """Two weights have an unbounded ratio on the comparison grid."""
