"""Exception hierarchy shared by all analysis modules."""


class AffThermoError(Exception):
    """Base class for all errors raised by this package."""

    module = "affthermo"


class PreconditionError(AffThermoError):
    """An operation was called with inputs violating its contract."""


class RankError(PreconditionError):
    module = "mat2"


class EmptyWord(PreconditionError):
    module = "symbolic"


class BudgetExceeded(AffThermoError):
    """An enumeration would exceed the configured node budget."""

    module = "symbolic"

    def __init__(self, message, nodes=None, budget=None):
        super().__init__(message)
        self.nodes = nodes
        self.budget = budget


class RankZeroLetter(PreconditionError):
    module = "classify"


class NoInvertibleLetters(PreconditionError):
    module = "classify"


class InvalidCertificate(PreconditionError):
    module = "pressure"


class MissingRankOne(PreconditionError):
    module = "pressure"


class MissingInvertible(PreconditionError):
    module = "pressure"


class EmptySigma(PreconditionError):
    module = "pressure"


class DepthMismatch(PreconditionError):
    module = "pressure"


class InconclusiveBracket(AffThermoError):
    """Affinity-dimension bisection ran out of budget before separating.

    Carries the best bracket achieved so far in ``bracket``.
    """

    module = "pressure"

    def __init__(self, message, bracket):
        super().__init__(message)
        self.bracket = bracket


class NotContractive(PreconditionError):
    module = "geometry"


class NotNonInvertible(PreconditionError):
    module = "geometry"


class ScaleBelowResolution(PreconditionError):
    module = "geometry"


class CommonFixedPoint(PreconditionError):
    module = "geometry"


class ParseError(AffThermoError):
    module = "cli"
