"""Exception hierarchy shared by every dynrel module."""

from __future__ import annotations


class DynrelError(Exception):
    """Base class for all errors raised by dynrel."""


class DomainError(DynrelError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ModelReferenceError(DynrelError, KeyError):
    """An expression names an event that the model or assignment does not define."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class StructureError(DynrelError):
    """An expression is malformed, e.g. a spare used outside a spare gate."""


class UnsupportedStructureError(DynrelError):
    """The analytic route has no formula for this expression shape."""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class NoEquivalenceError(DynrelError):
    """No verified DFT/DRBD equivalence exists for an operator."""


class CapacityError(DynrelError):
    """A request would blow past a fixed size guard."""


class IndependenceError(UnsupportedStructureError):
    """Sibling subexpressions share basic events, so products of probabilities are invalid."""

    def __init__(self, message: str):
        super().__init__(message)


class QuadratureError(DynrelError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error
