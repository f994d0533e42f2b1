"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class RamseyCatError(Exception):
    """Base class for all errors raised by ramseycat."""


class SizeLimitExceeded(RamseyCatError):
    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeds the configured cap of {cap}")
        self.what = what
        self.cap = cap


class BudgetExceeded(RamseyCatError):
    """A search ran out of budget before reaching a verdict.

    This is never a Witnessed or Refuted outcome; the verdict is unknown.
    """

    def __init__(self, stage: str, budget: int, stats: dict | None = None):
        super().__init__(f"budget of {budget} exhausted during {stage}")
        self.stage = stage
        self.budget = budget
        self.stats = dict(stats or {})


class Exhausted(RamseyCatError):
    """The candidate stream ended without a witness."""


class DomainMismatch(RamseyCatError):
    pass


# parameter words

class ParamWordError(RamseyCatError, ValueError):
    pass


class MissingVariable(ParamWordError):
    def __init__(self, i: int):
        super().__init__(f"variable x{i} does not occur in the word")
        self.i = i


class FirstOccurrenceOrder(ParamWordError):
    def __init__(self, i: int, j: int):
        super().__init__(f"first occurrence of x{i} is not before first occurrence of x{j}")
        self.i = i
        self.j = j


class ForeignSymbol(ParamWordError):
    def __init__(self, symbol):
        super().__init__(f"symbol {symbol!r} is neither an alphabet letter nor an admissible variable")
        self.symbol = symbol


class ArityMismatch(RamseyCatError, ValueError):
    pass


# structures

class KindMismatch(RamseyCatError, TypeError):
    pass


class SignatureMismatch(RamseyCatError, ValueError):
    pass


class UnknownSymbol(RamseyCatError, KeyError):
    pass


class NotAbsolutelyOrdered(RamseyCatError, ValueError):
    pass


class NotAnEmbedding(RamseyCatError, ValueError):
    pass


class NoEmbedding(RamseyCatError, ValueError):
    pass


# transfers

class EmbeddingCheckFailed(RamseyCatError, AssertionError):
    """Internal consistency failure; indicates a bug, never an expected outcome."""


class PreAdjunctionViolated(RamseyCatError):
    pass


class ComponentArrowUnverified(RamseyCatError):
    pass


class IncompatibleCone(RamseyCatError):
    pass


class ClosureFailed(RamseyCatError):
    pass


class ClassCountMismatch(RamseyCatError, ValueError):
    pass


class NotStrictlyIncreasing(RamseyCatError, ValueError):
    pass
