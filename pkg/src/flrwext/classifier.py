"""Open-FLRW and Milne-like conditions for a scale factor."""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, QuadratureError
from .numerics import (
    FINITE,
    INCONCLUSIVE,
    INFINITE,
    ZERO,
    Antiderivative,
    LimitEstimate,
    json_float,
    limit_at_zero,
    quad,
)
from .scale_factor import ScaleFactor, evaluate_jet

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"
GEOMETRIES = (EUCLIDEAN, HYPERBOLIC)

DIVERGENCE_INCREMENT = 0.05
DIVERGENCE_HALVINGS = 6
_DIVERGENCE_DEPTH = 40


@dataclass(frozen=True)
class SublinearCheck:
    m: float
    b: float
    holds: bool
    t_max: float
    note: str = "holds on sampled range"


@dataclass(frozen=True)
class FlrwReport:
    geometry: str
    cond_a0_zero: LimitEstimate
    cond_sublinear: SublinearCheck
    cond_a_prime_positive: bool
    overall: bool
    smoothness: str = "assumed (expression grammar is analytic where defined)"

    @property
    def inconclusive(self) -> bool:
        return not self.cond_a0_zero.conclusive

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry,
            "cond_a0_zero": self.cond_a0_zero.to_dict(),
            "cond_sublinear": {
                **asdict(self.cond_sublinear),
                "m": json_float(self.cond_sublinear.m),
                "b": json_float(self.cond_sublinear.b),
            },
            "cond_a_prime_positive": self.cond_a_prime_positive,
            "overall": self.overall,
            "smoothness": self.smoothness,
        }


@dataclass(frozen=True)
class MilneReport:
    a_prime_limit: LimitEstimate
    integral_diverges: bool
    b_prime_limit: LimitEstimate
    is_milne_like: bool
    inconclusive: bool

    def to_dict(self) -> dict:
        return {
            "a_prime_limit": self.a_prime_limit.to_dict(),
            "integral_diverges": self.integral_diverges,
            "b_prime_limit": self.b_prime_limit.to_dict(),
            "is_milne_like": self.is_milne_like,
            "inconclusive": self.inconclusive,
        }


# -- cached integrals ----------------------------------------------------------


@functools.lru_cache(maxsize=256)
def conformal_time(sf: ScaleFactor, c: float = 1.0) -> Antiderivative:
    """tau(t) = integral of 1/a from c to t."""
    return Antiderivative(lambda s: 1.0 / sf.value(s), c)


@functools.lru_cache(maxsize=256)
def area_primitive(sf: ScaleFactor) -> Antiderivative:
    """integral of a from 0 to t (the null coordinate of the 2D extension)."""
    return Antiderivative(sf.value, 0.0)


# -- conditions ----------------------------------------------------------------


def integral_one_over_a_diverges(sf: ScaleFactor) -> bool:
    """Whether integral_0^1 dt/a diverges.

    Each halving eps -> eps/2 adds integral_{eps/2}^{eps} 1/a.  The integral is
    declared divergent when the last six of forty such increments are all at
    least 0.05 (a logarithmic divergence adds a constant per halving; a
    convergent tail adds geometrically shrinking amounts).
    """
    g = lambda s: 1.0 / sf.value(s)
    increments = []
    eps = 1.0
    for _ in range(_DIVERGENCE_DEPTH):
        increments.append(quad(g, eps / 2.0, eps))
        eps /= 2.0
    return all(x >= DIVERGENCE_INCREMENT for x in increments[-DIVERGENCE_HALVINGS:])


def compute_b(sf: ScaleFactor, t: float, gauge: float = 1.0) -> float:
    """b(t) = gauge * exp(integral_1^t 1/a), so b/b' = a and b(1) = gauge."""
    return gauge * math.exp(conformal_time(sf, 1.0)(t))


def b_prime(sf: ScaleFactor, t: float, gauge: float = 1.0) -> float:
    return compute_b(sf, t, gauge) / sf.value(t)


def _sublinear(sf: ScaleFactor, t_max: float, n: int = 400) -> SublinearCheck:
    # a(t)/t must not keep growing: its max over the upper (log) half of the
    # sample may not exceed the max over the lower half.
    t_lo = min(1.0, t_max / 100.0)
    ts = np.geomspace(t_lo, t_max, n)
    try:
        ratio = np.array([sf.value(t) / t for t in ts])
    except DomainError:
        return SublinearCheck(math.inf, math.nan, False, t_max, "a not evaluable on sample")
    half = n // 2
    lower, upper = ratio[:half].max(), ratio[half:].max()
    holds = bool(np.isfinite(upper) and upper <= lower * (1.0 + 1e-9))
    m = float(ratio.max())
    b = float(sf.value(t_lo))
    note = "holds on sampled range" if holds else "a(t)/t still growing at t_max"
    return SublinearCheck(m, b, holds, t_max, note)


def check_open_flrw(
    sf: ScaleFactor, geometry: str = HYPERBOLIC, t_max: float = 100.0, tol: float = 1e-6
) -> FlrwReport:
    """Check conditions (2)-(4) of an open FLRW scale factor; (1) is assumed."""
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}")
    a0 = limit_at_zero(sf.value, tol=tol)
    sub = _sublinear(sf, t_max)
    ts = np.geomspace(1e-8, t_max, 300)
    try:
        positive = all(evaluate_jet(sf, float(t)).d1 > 0.0 for t in ts)
    except DomainError:
        positive = False
    overall = a0.verdict == ZERO and sub.holds and positive
    return FlrwReport(geometry, a0, sub, positive, overall)


def classify_milne_like(sf: ScaleFactor, tol: float = 1e-6) -> MilneReport:
    """Evaluate a'(0) = 1, divergence of integral 1/a, and 0 < b'(0) < inf.

    b'(0) is taken as the limit of b/a (b/b' = a), with b gauged by b(1) = 1.
    """
    a_lim = a_prime_at_zero(sf, tol)
    try:
        diverges = integral_one_over_a_diverges(sf)
    except QuadratureError:
        diverges = False
        quad_failed = True
    else:
        quad_failed = False
    try:
        b_lim = limit_at_zero(lambda t: b_prime(sf, t), tol=tol)
    except QuadratureError:
        b_lim = LimitEstimate(math.nan, math.inf, INCONCLUSIVE, 0)

    cond1 = a_lim.verdict == FINITE and abs(a_lim.value - 1.0) < tol
    cond3 = b_lim.verdict == FINITE and b_lim.value > 0.0
    inconclusive = quad_failed or INCONCLUSIVE in (a_lim.verdict, b_lim.verdict)
    return MilneReport(a_lim, diverges, b_lim, cond1 and diverges and cond3, inconclusive)


def a_prime_at_zero(sf: ScaleFactor, tol: float = 1e-6) -> LimitEstimate:
    return limit_at_zero(lambda t: evaluate_jet(sf, t).d1, tol=tol)


def b_prime_at_zero(sf: ScaleFactor, gauge: float = 1.0, tol: float = 1e-6) -> LimitEstimate:
    return limit_at_zero(lambda t: b_prime(sf, t, gauge), tol=tol)


__all__ = [
    "EUCLIDEAN",
    "HYPERBOLIC",
    "FlrwReport",
    "MilneReport",
    "SublinearCheck",
    "a_prime_at_zero",
    "b_prime",
    "b_prime_at_zero",
    "check_open_flrw",
    "classify_milne_like",
    "compute_b",
    "conformal_time",
    "integral_one_over_a_diverges",
    "INFINITE",
]
