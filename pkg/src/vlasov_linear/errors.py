"""Exception hierarchy.

Oracle/assertion failures derive from :class:`OracleFailure` so the CLI can map
them to exit code 2; everything else derived from :class:`VlasovError` is a
usage or numerical-precondition problem.
"""


class VlasovError(Exception):
    pass


class DomainError(VlasovError, ValueError):
    """Point outside the analytic strip where the requested function is defined."""


class PoleError(VlasovError, ZeroDivisionError):
    pass


class DivergentMoment(VlasovError, ValueError):
    pass


class QuadratureFailure(VlasovError, RuntimeError):
    pass


class TailClassMismatch(VlasovError, ValueError):
    pass


class BracketFailure(VlasovError, RuntimeError):
    pass


class RootCountMismatch(VlasovError, RuntimeError):
    pass


class NoConvergence(VlasovError, RuntimeError):
    pass


class UnderResolvedCurve(VlasovError, RuntimeError):
    pass


class MissingDispersionPoint(VlasovError, RuntimeError):
    pass


class ContourTooHigh(VlasovError, RuntimeError):
    pass


class MeshMismatch(VlasovError, ValueError):
    pass


class NonSeparable(VlasovError, ValueError):
    pass


class OracleFailure(VlasovError, AssertionError):
    """A checked mathematical property did not hold."""


class StabilityViolation(OracleFailure):
    pass


class ResidualTooLarge(OracleFailure):
    pass


class BracketViolation(OracleFailure):
    pass


class EnvelopeViolation(OracleFailure):
    pass


class IdentityViolation(OracleFailure):
    pass


class SmallDenominatorWarning(UserWarning):
    pass
