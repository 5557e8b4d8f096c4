"""Exception hierarchy."""

from __future__ import annotations


class PumpkitError(Exception):
    pass


class InvalidDataset(PumpkitError, ValueError):
    """Input data cannot form a valid dataset."""


class MalformedInput(InvalidDataset):
    pass


class DimensionMismatch(InvalidDataset):
    pass


class NonPositivePrice(InvalidDataset):
    pass


class NegativeQuantity(InvalidDataset):
    pass


class NonFiniteValue(InvalidDataset):
    pass


class TooLarge(PumpkitError, ValueError):
    """Brute-force routine refused an instance above its size guard."""


class ZeroExpenditure(PumpkitError, ValueError):
    pass


class LPError(PumpkitError):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


class IterationLimit(LPError):
    pass


class PreconditionFailed(PumpkitError):
    """A construction's hypothesis does not hold; ``witness`` names the offending cycle."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotCyclicallyMonotone(PreconditionFailed):
    pass


class PumpableUnderBudgets(PreconditionFailed):
    pass


class BetaSearchFailed(PumpkitError):
    pass


class TruncationWarning(UserWarning):
    """Cycle enumeration hit its cap; the derived value is a lower-quality estimate."""
