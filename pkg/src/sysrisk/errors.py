"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SysRiskError(Exception):
    """Base class for every error raised by this package."""


class InputError(SysRiskError, ValueError):
    """Malformed or inconsistent user input."""


class EmptySpace(InputError):
    pass


class DuplicateId(InputError):
    pass


class ZBelowOne(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotAProbability(InputError):
    pass


class NotASpan(InputError):
    pass


class MissingGamma(InputError):
    pass


class InvalidFiltration(InputError):
    pass


class NonMeasurablePrices(InputError):
    pass


class BudgetExceeded(InputError):
    pass


class NumericalError(SysRiskError, ArithmeticError):
    """The numerical engine could not produce a trustworthy answer."""


class NumericalBreakdown(NumericalError):
    pass


class InnerLPFailed(NumericalError):
    pass


class DualExtractionFailed(NumericalError):
    pass
