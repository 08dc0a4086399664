"""Exception hierarchy.

Every failure a module can signal is a subclass of :class:`CStarError`, so
the CLI can serialize any of them into a report without a catch-all.
"""


class CStarError(Exception):
    """Base class for all errors raised by this package."""


# numerics
class NotHermitian(CStarError, ValueError):
    pass


class NotPSD(CStarError, ValueError):
    pass


# algebra
class NoConvergence(CStarError, RuntimeError):
    pass


class AlgebraMismatch(CStarError, ValueError):
    pass


# channel
class NotUnital(CStarError, ValueError):
    pass


class NotCP(CStarError, ValueError):
    pass


class NotAnAlgebra(CStarError, RuntimeError):
    pass


class SchwarzViolation(CStarError, ValueError):
    pass


# gns
class InvalidState(CStarError, ValueError):
    pass


class DegenerateState(CStarError, ValueError):
    pass


class NotInvariant(CStarError, ValueError):
    pass


class NotSeparating(CStarError, ValueError):
    pass


class NotFaithful(CStarError, ValueError):
    pass


class ModularObstruction(CStarError, ValueError):
    """No ucp map satisfies the adjunction identity for the given state."""


class EquivalenceFailure(CStarError, RuntimeError):
    """Two conditions that must agree came out different (numerical trouble)."""


# stinespring / cgns
class NotUcp(CStarError, ValueError):
    pass


class GramNotPSD(CStarError, ValueError):
    pass


class IllDefined(CStarError, RuntimeError):
    pass


class DimensionCap(CStarError, MemoryError):
    pass


class BudgetExceeded(CStarError, ValueError):
    pass


class NotEquivalent(CStarError, RuntimeError):
    pass


class PreconditionFailed(CStarError, ValueError):
    pass


class CertificationError(CStarError, RuntimeError):
    """A constructed object failed one of its defining identities."""


# dilation
class NotMultiplicative(CStarError, ValueError):
    pass


class NoAdjoint(CStarError, ValueError):
    pass


class NotASection(CStarError, ValueError):
    def __init__(self, message, residual=None, witness=None):
        super().__init__(message)
        self.residual = residual
        self.witness = witness


# cli
class ParseError(CStarError, ValueError):
    pass


class ValidationError(CStarError, ValueError):
    pass
