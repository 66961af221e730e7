"""Time-to-failure algebra for dynamic fault trees and dynamic RBDs.

Every expression evaluates to an extended non-negative time: a finite float
``>= 0`` or ``math.inf``.  ``ALWAYS`` (0) is an item that has already failed,
``NEVER`` (+inf) one that cannot fail.

Evaluation is written with numpy ufuncs, so an :class:`Assignment` may hold
plain floats or equally shaped arrays (one entry per scenario).  Scalars in,
float out; arrays in, array out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

import numpy as np

from .errors import DomainError, ModelReferenceError, StructureError

ALWAYS_TIME = 0.0
NEVER_TIME = math.inf


def ext_time(value: float) -> float:
    """Validate and normalise an extended time value."""
    value = float(value)
    if math.isnan(value) or value < 0:
        raise DomainError(f"failure time must be >= 0 or +inf, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# Expression nodes
#
# ``name`` is display metadata (the DSL gate name) and never takes part in
# equality, so a reparsed or converted tree compares equal structurally.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Basic:
    id: str
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Block:
    id: str
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Always:
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Never:
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class _Binary:
    left: "Expr"
    right: "Expr"
    name: str | None = field(default=None, compare=False)

    def children(self) -> tuple["Expr", "Expr"]:
        return (self.left, self.right)


class DAnd(_Binary):
    """Fails when both inputs have failed (max)."""


class DOr(_Binary):
    """Fails when either input fails (min)."""


class DBefore(_Binary):
    """``left`` if it fails strictly before ``right``, otherwise never."""


class DSimult(_Binary):
    """``left`` if both fail at the same instant, otherwise never."""


class DInclusiveBefore(_Binary):
    """``left`` if it fails before or with ``right``, otherwise never."""


class Pand(_Binary):
    """Priority AND: fails at ``right`` provided ``left`` failed no later."""


class Fdep(_Binary):
    """Functional dependency; ``left`` is the trigger, ``right`` the dependent."""

    @property
    def trigger(self) -> "Expr":
        return self.left

    @property
    def dependent(self) -> "Expr":
        return self.right


class RAnd(_Binary):
    """Series connection: stops working at the first failure (min)."""


class ROr(_Binary):
    """Parallel connection: works while either branch works (max)."""


class RAfter(_Binary):
    """``left`` if it fails strictly after ``right``, otherwise never."""


class RSimult(_Binary):
    """``left`` if both fail at the same instant, otherwise never."""


class RInclusiveAfter(_Binary):
    """``left`` if it fails after or with ``right``, otherwise never."""


@dataclass(frozen=True)
class Wsp:
    """DFT warm spare gate: ``main`` backed by the spare event ``spare``."""

    main: "Expr"
    spare: str
    name: str | None = field(default=None, compare=False)

    def children(self) -> tuple["Expr"]:
        return (self.main,)


@dataclass(frozen=True)
class RWsp:
    """DRBD spare construct: ``main`` backed by the spare event ``spare``."""

    main: "Expr"
    spare: str
    name: str | None = field(default=None, compare=False)

    def children(self) -> tuple["Expr"]:
        return (self.main,)


Expr = Union[
    Basic, Block, Always, Never, DAnd, DOr, DBefore, DSimult, DInclusiveBefore,
    Pand, Fdep, Wsp, RAnd, ROr, RAfter, RSimult, RInclusiveAfter, RWsp,
]

DFT_NODES = (Basic, Always, Never, DAnd, DOr, DBefore, DSimult, DInclusiveBefore, Pand, Fdep, Wsp)
DRBD_NODES = (Block, Always, Never, RAnd, ROr, RAfter, RSimult, RInclusiveAfter, RWsp)


def children(expr: Expr) -> tuple:
    if isinstance(expr, (_Binary, Wsp, RWsp)):
        return expr.children()
    return ()


def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def leaf_ids(expr: Expr) -> set[str]:
    """Ids of ordinary events/blocks referenced by ``expr`` (spares excluded)."""
    return {n.id for n in walk(expr) if isinstance(n, (Basic, Block))}


def spare_ids(expr: Expr) -> list[str]:
    """Spare ids in traversal order; duplicates are kept so callers can detect sharing."""
    return [n.spare for n in walk(expr) if isinstance(n, (Wsp, RWsp))]


def event_ids(expr: Expr) -> set[str]:
    """Every event the expression touches, spares included."""
    return leaf_ids(expr) | set(spare_ids(expr))


def flatten(expr: Expr, kind: type) -> list[Expr]:
    """Operands of a maximal chain of ``kind`` nodes rooted at ``expr``."""
    if type(expr) is kind:
        return flatten(expr.left, kind) + flatten(expr.right, kind)
    return [expr]


def chain(kind: type, operands: list[Expr], name: str | None = None) -> Expr:
    """Left-associated binary chain; the inverse of :func:`flatten`."""
    if len(operands) < 2:
        raise StructureError(f"{kind.__name__} needs at least two operands")
    acc = operands[0]
    for op in operands[1:-1]:
        acc = kind(acc, op)
    return kind(acc, operands[-1], name=name)


# ---------------------------------------------------------------------------
# Assignments and pointwise semantics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assignment:
    """Failure instants for one scenario (or a vector of scenarios).

    ``spares`` maps a spare id to its ``(active, dormant)`` pair.  A coherent
    scenario has at most one of the two finite; the sampler guarantees that,
    evaluation itself does not insist on it.
    """

    times: Mapping[str, object] = field(default_factory=dict)
    spares: Mapping[str, tuple[object, object]] = field(default_factory=dict)

    def time(self, event_id: str):
        if event_id in self.spares:
            raise StructureError(f"spare {event_id!r} used outside a spare gate")
        try:
            return self.times[event_id]
        except KeyError:
            raise ModelReferenceError(f"no failure time assigned to {event_id!r}") from None

    def spare(self, spare_id: str):
        try:
            return self.spares[spare_id]
        except KeyError:
            if spare_id in self.times:
                raise StructureError(f"{spare_id!r} is not declared as a spare") from None
            raise ModelReferenceError(f"no spare times assigned to {spare_id!r}") from None


def before(a, b):
    return np.where(a < b, a, np.inf)


def simult(a, b):
    return np.where(a == b, a, np.inf)


def inclusive_before(a, b):
    return np.where(a <= b, a, np.inf)


def after(a, b):
    return np.where(a > b, a, np.inf)


def inclusive_after(a, b):
    return np.where(a >= b, a, np.inf)


def _wsp_dft(y, x_a, x_d):
    return np.minimum.reduce([
        np.maximum(y, before(x_d, y)),
        np.maximum(x_a, before(y, x_a)),
        simult(y, x_a),
        simult(y, x_d),
    ])


def _wsp_drbd(y, x_a, x_d):
    return np.minimum(after(x_a, y), after(y, x_d))


def _eval(expr: Expr, a: Assignment, dft: bool):
    match expr:
        case Basic(id=event_id) if dft:
            return np.asarray(a.time(event_id), dtype=float)
        case Block(id=event_id) if not dft:
            return np.asarray(a.time(event_id), dtype=float)
        case Always():
            return np.asarray(ALWAYS_TIME)
        case Never():
            return np.asarray(NEVER_TIME)
        case Wsp(main=main, spare=sp) if dft:
            x_a, x_d = a.spare(sp)
            return _wsp_dft(_eval(main, a, dft), np.asarray(x_a, float), np.asarray(x_d, float))
        case RWsp(main=main, spare=sp) if not dft:
            x_a, x_d = a.spare(sp)
            return _wsp_drbd(_eval(main, a, dft), np.asarray(x_a, float), np.asarray(x_d, float))
        case _Binary(left=left, right=right) if type(expr) in _BINARY_OPS[dft]:
            return _BINARY_OPS[dft][type(expr)](_eval(left, a, dft), _eval(right, a, dft))
    family = "DFT" if dft else "DRBD"
    raise StructureError(f"{type(expr).__name__} is not a {family} node")


_BINARY_OPS = {
    True: {
        DAnd: np.maximum,
        DOr: np.minimum,
        Fdep: np.minimum,
        DBefore: before,
        DSimult: simult,
        DInclusiveBefore: inclusive_before,
        Pand: lambda x, y: np.where(x <= y, y, np.inf),
    },
    False: {
        RAnd: np.minimum,
        ROr: np.maximum,
        RAfter: after,
        RSimult: simult,
        RInclusiveAfter: inclusive_after,
    },
}


def _unwrap(value):
    return float(value) if np.ndim(value) == 0 else value


def eval_dft(expr: Expr, a: Assignment):
    """Failure time of the DFT top event under assignment ``a``."""
    return _unwrap(_eval(expr, a, dft=True))


def eval_drbd(expr: Expr, a: Assignment):
    """Failure time of the DRBD structure under assignment ``a``."""
    return _unwrap(_eval(expr, a, dft=False))


def _check_t(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"mission time must be finite and >= 0, got {t!r}")
    return t


def dft_event_holds(expr: Expr, a: Assignment, t: float):
    """True when the top event has occurred by ``t`` (inclusive)."""
    t = _check_t(t)
    out = _eval(expr, a, dft=True) <= t
    return bool(out) if np.ndim(out) == 0 else out


def drbd_event_holds(expr: Expr, a: Assignment, t: float):
    """True when the structure is still working at ``t`` (strictly later failure)."""
    t = _check_t(t)
    out = _eval(expr, a, dft=False) > t
    return bool(out) if np.ndim(out) == 0 else out
