"""Closed-form and quadrature-based failure/reliability computation.

Two routes are offered:

* ``analyze_dft``: split the top event into a union of independent modules,
  compute each module with its gate formula and combine them by
  inclusion-exclusion (2**n - 1 signed intersection terms).
* ``analyze_drbd``: a single structural pass, product for series, parallel
  complement-product for parallel, integral formula for spare constructs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dist
from .algebra import (
    Always, Basic, Block, DAnd, DOr, Expr, Fdep, Never, Pand, RAnd, RInclusiveAfter,
    ROr, RWsp, Wsp, event_ids, flatten,
)
from .distributions import DistributionSpec, SpareSpec
from .errors import CapacityError, DomainError, IndependenceError, UnsupportedStructureError
from .model import AnalysisResult, Model
from .quadrature import DEFAULT_TOL, INNER_TOL, QuadResult, quadrature

MAX_PIE_MODULES = 20
PIE_IDENTITY_TOL = 1e-12


def _prob(p: float, label: str = "probability") -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"{label} must lie in [0, 1], got {p!r}")
    return p


def _time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"mission time must be finite and >= 0, got {t!r}")
    return t


# -- gate formulas -----------------------------------------------------------


def prob_and(fx: float, fy: float) -> float:
    return _prob(fx) * _prob(fy)


def prob_or(fx: float, fy: float) -> float:
    """Union of two independent events; also the FDEP formula."""
    fx, fy = _prob(fx), _prob(fy)
    return fx + fy - fx * fy


def pand_integral(dx: DistributionSpec, dy: DistributionSpec, t: float,
                  tol: float = DEFAULT_TOL) -> QuadResult:
    """P(X <= Y <= t) as the integral of f_Y(y) F_X(y) over [0, t]."""
    t = _time(t)
    return quadrature(lambda y: dist.pdf(dy, y) * dist.cdf(dx, y), 0.0, t, tol)


def prob_pand(dx: DistributionSpec, dy: DistributionSpec, t: float,
              tol: float = DEFAULT_TOL) -> float:
    return pand_integral(dx, dy, t, tol).value


def _activated_density(sp: SpareSpec, v, age):
    """Conditional active-failure density at ``v + age`` given activation at ``v``.

    Same value as ``spare_active_conditional_density(sp, v, v + age)``, but
    the active age is passed directly: recovering it as ``u - v`` can round
    to zero, where a Weibull density with shape below 1 is infinite.
    """
    return dist.dormant_survival(sp, v) * dist.pdf(sp.active, age)


def wsp_integrals(main: DistributionSpec, sp: SpareSpec, t: float, tol: float = DEFAULT_TOL,
                  inner_tol: float = INNER_TOL) -> QuadResult:
    """Failure probability of a warm spare gate by ``t``.

    Sum of "main fails at v, spare survived dormancy and then fails active in
    (v, t]" (a nested integral over the conditional active density) and
    "main fails at u after the spare already failed dormant".
    """
    t = _time(t)
    sp.check()
    inner_err = 0.0

    def activated(vs):
        nonlocal inner_err
        # inner integral over u in [v, t] rescaled to x in [0, 1], all outer nodes at once
        span = (t - vs)[:, None]
        r = quadrature(
            lambda x: span * _activated_density(sp, vs[:, None], span * x),
            0.0, 1.0, inner_tol)
        inner_err = max(inner_err, r.error)
        return r.value * dist.pdf(main, vs)

    # the two outer integrals share the tolerance budget
    active = quadrature(activated, 0.0, t, tol / 2)
    dormant = quadrature(lambda u: dist.pdf(main, u) * dist.dormant_cdf(sp, u), 0.0, t, tol / 2)
    return QuadResult(active.value + dormant.value, active.error + inner_err + dormant.error)


def prob_wsp(main: DistributionSpec, sp: SpareSpec, t: float, tol: float = DEFAULT_TOL) -> float:
    return wsp_integrals(main, sp, t, tol).value


def rel_wsp_direct(main: DistributionSpec, sp: SpareSpec, t: float, tol: float = DEFAULT_TOL,
                   inner_tol: float = INNER_TOL) -> QuadResult:
    """Spare-construct reliability from the double integral taken in the other order.

    The activated-failure region {0 <= y <= x <= t} is swept by the spare's
    failure instant ``x`` on the outside and the activation instant ``y``
    inside, which shares no intermediate quantity with :func:`wsp_integrals`.
    """
    t = _time(t)
    sp.check()
    inner_err = 0.0

    def by_failure(xs):
        nonlocal inner_err
        # inner integral over the activation instant y in [0, x], rescaled to [0, 1]
        # and folded at 1/2 so both ends (main density near y = 0, active density
        # near y = x) are approached from 0, where floats are dense
        xcol = xs[:, None]

        def joint(y, age):
            return xcol * _activated_density(sp, y, age) * dist.pdf(main, y)

        r = quadrature(lambda s: joint(xcol * s, xcol * (1.0 - s)) + joint(xcol * (1.0 - s), xcol * s),
                       0.0, 0.5, inner_tol)
        inner_err = max(inner_err, r.error)
        return r.value

    active = quadrature(by_failure, 0.0, t, tol / 2)
    dormant = quadrature(lambda y: dist.pdf(main, y) * dist.dormant_cdf(sp, y), 0.0, t, tol / 2)
    return QuadResult(1.0 - active.value - dormant.value, active.error + inner_err * t + dormant.error)


def rel_wsp(main: DistributionSpec, sp: SpareSpec, t: float, tol: float = DEFAULT_TOL,
            check: bool = True) -> QuadResult:
    """Reliability of a spare construct, cross-checked against the direct double integral."""
    fail = wsp_integrals(main, sp, t, tol)
    rel = QuadResult(1.0 - fail.value, fail.error)
    if check:
        direct = rel_wsp_direct(main, sp, t, tol)
        if abs(direct.value - rel.value) > 2 * tol + rel.error + direct.error:
            raise ArithmeticError(
                f"spare reliability routes disagree: {rel.value!r} vs {direct.value!r}")
    return rel


def rel_series(rels) -> float:
    return math.prod(_prob(r, "reliability") for r in rels)


def rel_parallel(rels) -> float:
    rels = [_prob(r, "reliability") for r in rels]
    if not rels:
        return 0.0
    return 1.0 - math.prod(1.0 - r for r in rels)


# -- inclusion-exclusion -----------------------------------------------------


@dataclass(frozen=True)
class PieTerm:
    subset: tuple[int, ...]
    sign: int


def pie_expand(n: int) -> list[PieTerm]:
    """All nonempty subsets of ``range(n)`` with their inclusion-exclusion signs."""
    if not 1 <= n <= MAX_PIE_MODULES:
        raise CapacityError(f"inclusion-exclusion supports 1..{MAX_PIE_MODULES} modules, got {n}")
    terms = []
    for mask in range(1, 1 << n):
        subset = tuple(i for i in range(n) if mask >> i & 1)
        terms.append(PieTerm(subset, 1 if len(subset) % 2 else -1))
    return terms


def _check_disjoint(sets, what: str) -> None:
    seen: dict[str, int] = {}
    for i, ids in enumerate(sets):
        for eid in ids:
            if eid in seen:
                raise IndependenceError(
                    f"event {eid!r} is shared by {what} {seen[eid]} and {i}; "
                    "independent combination does not apply")
            seen[eid] = i


def _pie_sum(ps: list[float]) -> float:
    # products for every subset mask, built by doubling: mask | bit(i) -> prods[mask] * p_i
    prods = np.ones(1)
    for p in ps:
        prods = np.concatenate([prods, prods * p])
    masks = np.arange(1, prods.size)
    sizes = np.array([bin(m).count("1") for m in masks])
    signed = np.where(sizes % 2 == 1, prods[1:], -prods[1:])
    return math.fsum(signed.tolist())


def union_probability(probs, event_sets=None) -> float:
    """P(union of independent events) by inclusion-exclusion.

    The complement-product form is computed alongside and must agree to
    1e-12; ``event_sets`` (one id set per event) are checked for overlap.
    """
    ps = [_prob(p) for p in probs]
    if not 1 <= len(ps) <= MAX_PIE_MODULES:
        raise CapacityError(f"inclusion-exclusion supports 1..{MAX_PIE_MODULES} events, got {len(ps)}")
    if event_sets is not None:
        _check_disjoint(event_sets, "modules")
    pie = _pie_sum(ps)
    product = 1.0 - math.prod(1.0 - p for p in ps)
    if abs(pie - product) > PIE_IDENTITY_TOL:
        raise ArithmeticError(f"inclusion-exclusion {pie!r} disagrees with complement product {product!r}")
    return pie


# -- model routes ------------------------------------------------------------


def _leaf_law(model: Model, node: Expr, leaf_type: type) -> DistributionSpec:
    if not isinstance(node, leaf_type):
        raise UnsupportedStructureError(
            f"expected a {leaf_type.__name__.lower()} event operand, found {type(node).__name__}", node)
    law = model.events[node.id]
    if isinstance(law, SpareSpec):
        raise UnsupportedStructureError(f"spare {node.id!r} used as an ordinary operand", node)
    return law


def _dft_module(model: Model, node: Expr, t: float, tol: float) -> tuple[float, float]:
    match node:
        case Always():
            return 1.0, 0.0
        case Never():
            return 0.0, 0.0
        case Basic():
            return dist.cdf(_leaf_law(model, node, Basic), t), 0.0
        case DAnd():
            ops = flatten(node, DAnd)
            _check_disjoint([event_ids(o) for o in ops], "AND inputs")
            p = 1.0
            for o in ops:
                if isinstance(o, (Always, Never)):
                    p *= 1.0 if isinstance(o, Always) else 0.0
                else:
                    p = prob_and(p, dist.cdf(_leaf_law(model, o, Basic), t))
            return p, 0.0
        case Fdep(left=trig, right=dep):
            _check_disjoint([event_ids(trig), event_ids(dep)], "FDEP inputs")
            return prob_or(dist.cdf(_leaf_law(model, trig, Basic), t),
                           dist.cdf(_leaf_law(model, dep, Basic), t)), 0.0
        case Pand(left=x, right=y):
            _check_disjoint([event_ids(x), event_ids(y)], "PAND inputs")
            r = pand_integral(_leaf_law(model, x, Basic), _leaf_law(model, y, Basic), t, tol)
            return r.value, r.error
        case Wsp(main=main, spare=sp):
            r = wsp_integrals(_leaf_law(model, main, Basic), model.events[sp], t, tol)
            return r.value, r.error
    raise UnsupportedStructureError(
        f"{type(node).__name__} cannot be a module of the DFT inclusion-exclusion route "
        "(use a single AND/PAND/FDEP/WSP gate over basic events, or Monte Carlo)", node)


def analyze_dft(model: Model, t: float, tol: float = DEFAULT_TOL) -> AnalysisResult:
    """Unreliability of a DFT whose top event is an OR of independent modules."""
    if model.kind != "dft":
        raise UnsupportedStructureError("analyze_dft needs a dft model; convert it first")
    model.check()
    t = _time(t)
    modules = flatten(model.top, DOr)
    _check_disjoint([event_ids(m) for m in modules], "OR modules")
    probs, errs = zip(*(_dft_module(model, m, t, tol) for m in modules))
    value = union_probability(probs)
    return AnalysisResult(model.name, model.kind, "dft-pie", t, value,
                          math.fsum(errs), (1 << len(modules)) - 1)


def _drbd_rel(model: Model, node: Expr, t: float, tol: float) -> tuple[float, float]:
    match node:
        case Always():
            return 0.0, 0.0
        case Never():
            return 1.0, 0.0
        case Block():
            return dist.survival(_leaf_law(model, node, Block), t), 0.0
        case RAnd() | ROr():
            ops = flatten(node, type(node))
            _check_disjoint([event_ids(o) for o in ops],
                            "series branches" if isinstance(node, RAnd) else "parallel branches")
            rels, errs = zip(*(_drbd_rel(model, o, t, tol) for o in ops))
            combine = rel_series if isinstance(node, RAnd) else rel_parallel
            return combine(rels), math.fsum(errs)
        case RWsp(main=main, spare=sp):
            r = rel_wsp(_leaf_law(model, main, Block), model.events[sp], t, tol)
            return r.value, r.error
        case RInclusiveAfter(left=y, right=x):
            # Y inclusive-after X is the PAND(X, Y) gate seen as a success model.
            _check_disjoint([event_ids(x), event_ids(y)], "inclusive-after inputs")
            r = pand_integral(_leaf_law(model, x, Block), _leaf_law(model, y, Block), t, tol)
            return 1.0 - r.value, r.error
    raise UnsupportedStructureError(
        f"no reliability formula for a standalone {type(node).__name__} node", node)


def analyze_drbd(model: Model, t: float, tol: float = DEFAULT_TOL) -> AnalysisResult:
    """Reliability of a DRBD built from series, parallel and spare constructs."""
    if model.kind != "drbd":
        raise UnsupportedStructureError("analyze_drbd needs a drbd model; convert it first")
    model.check()
    t = _time(t)
    value, err = _drbd_rel(model, model.top, t, tol)
    return AnalysisResult(model.name, model.kind, "drbd-structural", t, value, err, 1)
