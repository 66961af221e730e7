"""Monte Carlo oracle: sample coherent failure scenarios and count top-event outcomes.

Scenarios are generated in fixed blocks of ``BLOCK`` rows.  Block ``b`` draws
from a Philox stream keyed by the seed with ``b`` in the counter's high word,
so its uniforms depend only on ``(seed, b)``.  Workers only decide which
thread evaluates which block; the integer counts are summed afterwards, so
the result is bit-identical for every worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

import numpy as np

from . import distributions as dist
from .algebra import Assignment, RWsp, Wsp, eval_dft, eval_drbd, walk
from .distributions import SpareSpec
from .errors import DomainError, StructureError
from .model import Estimate, Model, ci95

BLOCK = 1 << 16
_UNIT = 2.0**-53


def _layout(model: Model) -> list[tuple[str, int]]:
    """Uniform column of each event: one for ordinary events, two (dormant, active) for spares."""
    cols, k = [], 0
    for eid, law in model.events.items():
        cols.append((eid, k))
        k += 2 if isinstance(law, SpareSpec) else 1
    return cols


def _width(model: Model) -> int:
    return sum(2 if isinstance(v, SpareSpec) else 1 for v in model.events.values())


def _evaluator(model: Model):
    return eval_dft if model.kind == "dft" else eval_drbd


def scenarios(model: Model, u: np.ndarray) -> Assignment:
    """Turn a (rows, width) array of uniforms into a vector assignment."""
    columns = dict(_layout(model))
    times = {eid: dist.sample(model.events[eid], u[:, columns[eid]]) for eid in model.ordinary_ids()}
    times = {k: np.atleast_1d(v) for k, v in times.items()}
    spares: dict[str, tuple] = {}
    mains = model.spare_mains()
    # reversed pre-order visits inner spare gates before the gates that contain them
    gates = [n for n in walk(model.top) if isinstance(n, (Wsp, RWsp))][::-1]
    evaluate = _evaluator(model)
    rows = u.shape[0]
    for gate in gates:
        sp: SpareSpec = model.events[gate.spare]
        c = columns[gate.spare]
        law = sp.dormant_law()
        if law is None:
            dormant = np.full(rows, np.inf)
        else:
            dormant = np.atleast_1d(dist.sample(law, u[:, c]))
        active_life = np.atleast_1d(dist.sample(sp.active, u[:, c + 1]))
        y = np.broadcast_to(evaluate(gate.main, Assignment(times, spares)), (rows,))
        failed_dormant = dormant <= y
        x_a = np.where(failed_dormant, np.inf, y + active_life)
        x_d = np.where(failed_dormant, dormant, np.inf)
        spares[gate.spare] = (x_a, x_d)
    for sid in model.spare_ids():
        if sid not in mains:
            raise StructureError(f"spare {sid!r} has no main event (not used by any spare gate)")
    return Assignment(times, spares)


def sample_scenario(model: Model, draw: Iterable[float]) -> Assignment:
    """One scenario from a stream of uniforms, consumed in declaration order.

    Each ordinary event takes one draw; each spare takes two (dormant life,
    then active life).
    """
    it = iter(draw)
    u = np.array([[next(it) for _ in range(_width(model))]], dtype=float)
    a = scenarios(model, u)
    return Assignment(
        {k: float(v[0]) for k, v in a.times.items()},
        {k: (float(xa[0]), float(xd[0])) for k, (xa, xd) in a.spares.items()},
    )


def block_uniforms(seed: int, block: int, rows: int, width: int) -> np.ndarray:
    """Uniforms in the open interval (0, 1) for one block of scenarios."""
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, block]))
    k = gen.integers(1, 1 << 53, size=(rows, width), dtype=np.uint64)
    return k.astype(float) * _UNIT


def _count_failures(model: Model, t: float, seed: int, block: int, rows: int) -> int:
    u = block_uniforms(seed, block, rows, _width(model))
    times = _evaluator(model)(model.top, scenarios(model, u))
    return int(np.count_nonzero(np.asarray(times) <= t))


def count_failures(model: Model, t: float, n: int, seed: int, workers: int = 1) -> int:
    """Number of the first ``n`` scenarios whose top event has occurred by ``t``."""
    if n < 1:
        raise DomainError("sample count must be >= 1")
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"mission time must be finite and >= 0, got {t!r}")
    if not 0 <= seed < 1 << 64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    model.check()
    for sp in model.spare_ids():
        model.events[sp].check()
    blocks = [(b, min(BLOCK, n - b * BLOCK)) for b in range(math.ceil(n / BLOCK))]
    if workers <= 1:
        return sum(_count_failures(model, t, seed, b, rows) for b, rows in blocks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda br: _count_failures(model, t, seed, *br), blocks))


def _estimate(model: Model, method: str, t: float, hits: int, n: int, seed: int) -> Estimate:
    p = hits / n
    se = math.sqrt(p * (1.0 - p) / n)
    return Estimate(model.name, model.kind, method, float(t), p, se, n, seed, ci95(p, se))


def estimate_unreliability(model: Model, t: float, n: int, seed: int, workers: int = 1) -> Estimate:
    """Fraction of scenarios where the top event occurs by ``t`` (inclusive).

    For a DRBD model the same inclusive test is applied to the structure's
    failure time, i.e. this is the complement of its reliability.
    """
    k = count_failures(model, t, n, seed, workers)
    return _estimate(model, "mc-unreliability", t, k, n, seed)


def estimate_reliability(model: Model, t: float, n: int, seed: int, workers: int = 1) -> Estimate:
    """Fraction of scenarios where the failure instant lies strictly after ``t``."""
    k = count_failures(model, t, n, seed, workers)
    return _estimate(model, "mc-reliability", t, n - k, n, seed)


def estimate_both(model: Model, t: float, n: int, seed: int, workers: int = 1) -> tuple[Estimate, Estimate]:
    """Unreliability and reliability from one shared set of scenarios."""
    k = count_failures(model, t, n, seed, workers)
    return (_estimate(model, "mc-unreliability", t, k, n, seed),
            _estimate(model, "mc-reliability", t, n - k, n, seed))
