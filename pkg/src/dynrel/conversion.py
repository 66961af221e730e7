"""Translation between DFT and DRBD expressions along the verified gate equivalences.

=============  ==========================
DFT gate       DRBD operator
=============  ==========================
AND(X, Y)      OR(X, Y)
OR(X, Y)       AND(X, Y)
FDEP(X, Y)     AND(X, Y)
PAND(X, Y)     INCLUSIVE_AFTER(Y, X)
WSP(Y, X)      WSP(Y, X)   (distinct Y, X_a, X_d)
=============  ==========================

The bare temporal operators have no counterpart and are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import (
    Always, Basic, Block, DAnd, DBefore, DInclusiveBefore, DOr, DSimult, Expr, Fdep, Never,
    Pand, RAfter, RAnd, RInclusiveAfter, ROr, RSimult, RWsp, Wsp,
)
from .analytic import analyze_dft, analyze_drbd
from .errors import DynrelError, NoEquivalenceError, StructureError
from .model import Model


def dft_to_drbd(e: Expr) -> Expr:
    match e:
        case Basic(id=i, name=n):
            return Block(i, name=n)
        case Always() | Never():
            return e
        case DAnd(left=l, right=r, name=n):
            return ROr(dft_to_drbd(l), dft_to_drbd(r), name=n)
        case DOr(left=l, right=r, name=n) | Fdep(left=l, right=r, name=n):
            return RAnd(dft_to_drbd(l), dft_to_drbd(r), name=n)
        case Pand(left=x, right=y, name=n):
            return RInclusiveAfter(dft_to_drbd(y), dft_to_drbd(x), name=n)
        case Wsp(main=m, spare=s, name=n):
            return RWsp(dft_to_drbd(m), s, name=n)
        case DBefore() | DSimult() | DInclusiveBefore():
            raise NoEquivalenceError(
                f"{type(e).__name__} has no DRBD equivalent; only the AND, OR, FDEP, PAND "
                "and spare gates carry a verified equivalence")
    raise StructureError(f"{type(e).__name__} is not a DFT node")


def drbd_to_dft(e: Expr) -> Expr:
    match e:
        case Block(id=i, name=n):
            return Basic(i, name=n)
        case Always() | Never():
            return e
        case RAnd(left=l, right=r, name=n):
            return DOr(drbd_to_dft(l), drbd_to_dft(r), name=n)
        case ROr(left=l, right=r, name=n):
            return DAnd(drbd_to_dft(l), drbd_to_dft(r), name=n)
        case RInclusiveAfter(left=y, right=x, name=n):
            return Pand(drbd_to_dft(x), drbd_to_dft(y), name=n)
        case RWsp(main=m, spare=s, name=n):
            return Wsp(drbd_to_dft(m), s, name=n)
        case RAfter() | RSimult():
            raise NoEquivalenceError(f"{type(e).__name__} has no DFT gate equivalent")
    raise StructureError(f"{type(e).__name__} is not a DRBD node")


def convert_model(model: Model) -> Model:
    """The same system seen from the other side (failure <-> success model)."""
    if model.kind == "dft":
        return model.with_top(dft_to_drbd(model.top), "drbd")
    return model.with_top(drbd_to_dft(model.top), "dft")


@dataclass(frozen=True)
class ComplementReport:
    unreliability: float
    reliability: float
    residual: float
    unreliability_error: float
    reliability_error: float
    pie_terms: int


def complement_report(model: Model, t: float, tol: float | None = None) -> ComplementReport:
    """Unreliability from the DFT route, reliability from the DRBD route, and ``|1 - sum|``.

    When only one route handles the model the missing side is reported as
    NaN along with a NaN residual; if neither does, the DFT route's error is
    raised with the DRBD error chained.
    """
    kw = {} if tol is None else {"tol": tol}
    dft = model if model.kind == "dft" else convert_model(model)
    drbd = model if model.kind == "drbd" else convert_model(model)
    errors = []
    try:
        unrel = analyze_dft(dft, t, **kw)
    except DynrelError as exc:
        unrel, errors = None, [exc]
    try:
        rel = analyze_drbd(drbd, t, **kw)
    except DynrelError as exc:
        if unrel is None:
            raise errors[0] from exc
        rel = None
    u = unrel.value if unrel else math.nan
    r = rel.value if rel else math.nan
    return ComplementReport(
        unreliability=u,
        reliability=r,
        residual=abs(1.0 - (u + r)),
        unreliability_error=unrel.error_bound if unrel else math.nan,
        reliability_error=rel.error_bound if rel else math.nan,
        pie_terms=unrel.term_count if unrel else 0,
    )
