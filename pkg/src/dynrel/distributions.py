"""Lifetime laws for basic events and the warm-spare dormant/active model.

All functions accept floats or numpy arrays for the time argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise DomainError(f"exponential rate must be > 0, got {self.rate!r}")


@dataclass(frozen=True)
class Weibull:
    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise DomainError(f"weibull shape must be > 0, got {self.shape!r}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"weibull scale must be > 0, got {self.scale!r}")


DistributionSpec = Exponential | Weibull


@dataclass(frozen=True)
class SpareSpec:
    """A spare with its active law and dormancy factor.

    The factor is not range-checked on construction so that a parsed model
    with a bad factor can still be reported on by ``validate``; every
    numerical use goes through :meth:`dormant_law`, which does check it.
    """

    active: DistributionSpec
    dormancy: float

    def check(self) -> None:
        if not (0.0 <= self.dormancy <= 1.0):
            raise DomainError(f"dormancy factor must lie in [0, 1], got {self.dormancy!r}")

    def dormant_law(self) -> DistributionSpec | None:
        """Law of the dormant lifetime, or ``None`` for a cold spare (never fails dormant)."""
        self.check()
        if self.dormancy == 0.0:
            return None
        d = self.active
        if isinstance(d, Exponential):
            return Exponential(d.rate * self.dormancy)
        return Weibull(d.shape, d.scale / self.dormancy ** (1.0 / d.shape))


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError("time must be >= 0")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _cum_hazard(d: DistributionSpec, t):
    if isinstance(d, Exponential):
        return d.rate * t
    return (t / d.scale) ** d.shape


def cdf(d: DistributionSpec, t):
    """P(T <= t)."""
    t = _check_time(t)
    return _out(-np.expm1(-_cum_hazard(d, t)))


def survival(d: DistributionSpec, t):
    """P(T > t)."""
    t = _check_time(t)
    return _out(np.exp(-_cum_hazard(d, t)))


def pdf(d: DistributionSpec, t):
    t = _check_time(t)
    if isinstance(d, Exponential):
        return _out(d.rate * np.exp(-d.rate * t))
    k, lam = d.shape, d.scale
    z = t / lam
    with np.errstate(divide="ignore"):
        dens = (k / lam) * z ** (k - 1) * np.exp(-(z**k))
    return _out(dens)


def sample(d: DistributionSpec, u):
    """Inverse-CDF transform of a uniform draw in the open interval (0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0) or np.any(u >= 1) or np.any(np.isnan(u)):
        raise DomainError("uniform draw must lie strictly inside (0, 1)")
    h = -np.log1p(-u)
    if isinstance(d, Exponential):
        return _out(h / d.rate)
    return _out(d.scale * h ** (1.0 / d.shape))


def dormant_cdf(sp: SpareSpec, t):
    law = sp.dormant_law()
    if law is None:
        return _out(np.zeros_like(_check_time(t)))
    return cdf(law, t)


def dormant_survival(sp: SpareSpec, t):
    law = sp.dormant_law()
    if law is None:
        return _out(np.ones_like(_check_time(t)))
    return survival(law, t)


def spare_active_conditional_density(sp: SpareSpec, v, u):
    """Density of the spare failing in active mode at ``u`` given activation at ``v``.

    Equals ``S_dormant(v) * f_active(u - v)``: the spare must survive dormancy
    up to ``v``, after which its active lifetime starts afresh.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(u < v):
        raise DomainError("spare cannot fail in active mode before it is activated")
    return _out(np.asarray(dormant_survival(sp, v)) * np.asarray(pdf(sp.active, u - v)))
