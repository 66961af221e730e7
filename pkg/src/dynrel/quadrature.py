"""Globally adaptive Gauss-Kronrod (7/15 point) quadrature."""

from __future__ import annotations

import heapq
import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, QuadratureError

# Kronrod abscissae on [-1, 1]; every odd entry (1, 3, 5, 7 counting from 0) is a Gauss node.
_XK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])

DEFAULT_TOL = 1e-9
INNER_TOL = 1e-10
_ROUNDOFF = 50 * np.finfo(float).eps
MAX_INTERVALS = 2000


class QuadResult(NamedTuple):
    value: float
    error: float


def _gk15(f: Callable, a: float, b: float):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _XK), dtype=float)
    if fx.shape[-1:] != _XK.shape:
        fx = np.broadcast_to(fx, fx.shape + _XK.shape if fx.ndim else _XK.shape)
    if not np.all(np.isfinite(fx)):
        raise DomainError(f"integrand is not finite on [{a!r}, {b!r}]")
    kronrod = half * (fx @ _WK)
    gauss = half * (fx[..., 1::2] @ _WG)
    return kronrod, float(np.max(np.abs(kronrod - gauss)))


def _total(parts):
    if np.ndim(parts[0]) == 0:
        return math.fsum(float(p) for p in parts)
    return np.sum(np.sort(np.stack(parts), axis=0), axis=0)


def quadrature(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL,
               max_intervals: int = MAX_INTERVALS) -> QuadResult:
    """Integrate ``f`` over ``[a, b]`` to absolute error ``tol``.

    ``f`` is called with an array of 15 nodes and returns either an array of
    the same shape (a scalar is broadcast) or an array of shape ``(m, 15)``
    for ``m`` integrands sharing the nodes; the result value then has shape
    ``(m,)`` and the error is the worst component's.  The interval with the
    largest error estimate is bisected until the summed estimate drops
    below ``tol``.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise DomainError(f"need finite a <= b, got [{a!r}, {b!r}]")
    if tol <= 0:
        raise DomainError("tol must be > 0")
    a, b = float(a), float(b)
    if a == b:
        return QuadResult(0.0, 0.0)

    value, err = _gk15(f, a, b)
    floor = _ROUNDOFF * float(np.max(np.abs(value)))
    if err > tol and tol < floor:
        # refinement cannot push the error under the rounding level of the result
        raise QuadratureError(f"adaptive quadrature did not converge: tol {tol!r} is below "
                              f"the rounding level {floor:.3g} of the estimate", value, err)
    heap = [(-err, a, b, 0, value)]
    tiebreak = 1
    total_err = err
    while total_err > tol:
        if len(heap) >= max_intervals:
            raise QuadratureError("adaptive quadrature did not converge",
                                  _total([h[-1] for h in heap]), total_err)
        worst = heapq.heappop(heap)
        _, lo, hi, _, _ = worst
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            heapq.heappush(heap, worst)
            raise QuadratureError("interval cannot be bisected further",
                                  _total([h[-1] for h in heap]), total_err)
        for left, right in ((lo, mid), (mid, hi)):
            try:
                v, e = _gk15(f, left, right)
            except DomainError as exc:
                raise QuadratureError(f"refinement hit a singularity: {exc}",
                                      _total([h[-1] for h in heap] + [worst[-1]]), total_err) from None
            heapq.heappush(heap, (-e, left, right, tiebreak, v))
            tiebreak += 1
        total_err = math.fsum(-h[0] for h in heap)
    value = _total([h[-1] for h in heap])
    return QuadResult(float(value) if np.ndim(value) == 0 else value, float(total_err))
