"""Exception hierarchy shared by all modules."""


class WildQuotError(Exception):
    """Base class for every error raised by the package."""


class NotPrime(WildQuotError, ValueError):
    pass


class NoIrreducible(WildQuotError):
    pass


class FieldMismatch(WildQuotError, TypeError):
    pass


class InfeasibleConstraint(WildQuotError, ValueError):
    pass


class RingMismatch(WildQuotError, TypeError):
    pass


class MissingImage(WildQuotError, KeyError):
    pass


class UnknownVariable(WildQuotError, KeyError):
    pass


class ZeroPolynomial(WildQuotError, ValueError):
    pass


class ResourceBudgetExceeded(WildQuotError, RuntimeError):
    """A budgeted computation gave up; the instance is too large, the answer is not wrong."""


class EmptyLocus(WildQuotError):
    """The ideal is the unit ideal, so its vanishing locus is empty."""


class PseudoReflectionForced(WildQuotError, ValueError):
    pass


class EnumerationBudgetExceeded(WildQuotError, RuntimeError):
    pass


class CapTooSmall(WildQuotError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoRelationFound(WildQuotError):
    pass


class CenterNotInSingularLocus(WildQuotError):
    pass


class NonCoordinateCenter(WildQuotError, ValueError):
    pass


class InconsistentTower(WildQuotError):
    pass


class ExponentOutOfRange(WildQuotError, ValueError):
    pass


class PolySyntaxError(WildQuotError, SyntaxError):
    """Parse failure carrying a 1-based line and column."""

    def __init__(self, message, text="", line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.msg_text = message
        self.source = text
        self.line = line
        self.column = column
