"""Exception hierarchy shared by every module of the package."""


class InfostabError(Exception):
    """Base class for all errors raised by infostab."""


class AlphaNearOne(InfostabError, ValueError):
    """The exponent lies inside the guard band around 1, where K(alpha) diverges."""


class TAlphaUndefined(InfostabError, ValueError):
    pass


class OutOfDomain(InfostabError, ValueError):
    pass


class TabulatedExtrapolation(OutOfDomain):
    pass


class NonFiniteValue(InfostabError, ArithmeticError):
    """A residual or evaluation produced inf/NaN.

    ``where`` carries the offending sample (a point, or a pair of points) when known.
    """

    def __init__(self, message, where=None):
        super().__init__(message if where is None else f"{message} at {where}")
        self.where = where


class ZeroAlphaHasNoC(InfostabError, ValueError):
    pass


class DegenerateGrid(InfostabError, ValueError):
    pass


class DegenerateBasis(InfostabError, ValueError):
    pass


class CaseMismatch(InfostabError, ValueError):
    pass


class InsufficientSlackSequence(InfostabError, ValueError):
    pass


class ConfigError(InfostabError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
