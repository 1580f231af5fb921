"""Strongly spherically symmetric (SSS) charts of open FLRW spacetimes.

Coordinates (T, R) with g = -F dT^2 + G dR^2 + R^2 dOmega^2, built from

    Euclidean:   R = r a(t),       s = r^2/2 + I(t),       T = f(s)
    hyperbolic:  R = sinh(r) a(t), s = ln cosh r + I(t),   T = f(s)

where I(t) = integral_1^t ds / (a a').  Matching the FLRW metric forces

    Euclidean:   G = 1/(1 - r^2 a'^2),               F = G (a a' / f')^2
    hyperbolic:  G = 1/(1 + sinh^2 r (1 - a'^2)),    F = G (a a' cosh r / f')^2

and the transformation degenerates where J = T_r R_t - T_t R_r vanishes.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifier import EUCLIDEAN, GEOMETRIES, HYPERBOLIC
from .errors import DegeneracyError, DomainError, GaugeError, HypothesisViolation
from .jet import Jet2
from .numerics import FINITE, INCONCLUSIVE, INFINITE, ZERO, Antiderivative, LimitEstimate, limit_at_zero
from .scale_factor import IDENTITY_GAUGE, GaugeFunction, ScaleFactor, evaluate_jet

DEGENERACY_MARGIN = 1e-3
_SINGULAR_TOL = 1e-12


@functools.lru_cache(maxsize=256)
def inverse_hubble_primitive(sf: ScaleFactor) -> Antiderivative:
    """I(t) = integral_1^t ds / (a(s) a'(s))."""

    def integrand(s: float) -> float:
        a, a1, _ = evaluate_jet(sf, s)
        return 1.0 / (a * a1)

    return Antiderivative(integrand, 1.0)


@dataclass(frozen=True)
class SssPoint:
    r: float
    t: float
    T: float
    R: float
    F: float
    G: float
    J: float
    s: float
    singular: bool = False


@dataclass(frozen=True)
class SssChart:
    sf: ScaleFactor
    geometry: str
    gauge: GaugeFunction = field(default=IDENTITY_GAUGE)

    def __post_init__(self):
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}")

    # radial pieces: S(r) in R = S a, P(r) in s = P + I, and dP/dr
    def _radial(self, r: float) -> tuple[float, float, float, float]:
        if self.geometry == EUCLIDEAN:
            return r, 0.5 * r * r, r, 1.0
        ch = math.cosh(r)
        return math.sinh(r), math.log(ch), math.tanh(r), ch

    def s(self, r: float, t: float) -> float:
        return self._radial(r)[1] + inverse_hubble_primitive(self.sf)(t)

    def R(self, r: float, t: float) -> float:
        return self._radial(r)[0] * self.sf.value(t)

    def T(self, r: float, t: float) -> float:
        return self.gauge(self.s(r, t))

    def g_denominator(self, r: float, a1: float) -> float:
        """1/G as a function of r and a'(t)."""
        if self.geometry == EUCLIDEAN:
            return 1.0 - r * r * a1 * a1
        return 1.0 + math.sinh(r) ** 2 * (1.0 - a1 * a1)

    def reduced_jacobian(self, r: float, a1: float) -> float:
        """J / f'(s), which depends on (r, a') only."""
        if self.geometry == EUCLIDEAN:
            return r * r * a1 - 1.0 / a1
        return -self.g_denominator(r, a1) / (a1 * math.cosh(r))

    def evaluate(self, r: float, t: float) -> SssPoint:
        """All chart functions at (r, t); points on the degeneracy curve come back tagged singular."""
        if not t > 0.0 or r < 0.0:
            raise DomainError("SSS charts live on t > 0, r >= 0")
        a, a1, _ = evaluate_jet(self.sf, t)
        S, _, _, C = self._radial(r)
        s = self.s(r, t)
        fp = self.gauge.derivative(s)
        if fp == 0.0:
            raise GaugeError(f"gauge derivative vanishes at s={s!r}")
        denom = self.g_denominator(r, a1)
        J = fp * self.reduced_jacobian(r, a1)
        if abs(denom) < _SINGULAR_TOL:
            return SssPoint(r, t, self.gauge(s), S * a, math.nan, math.nan, J, s, True)
        G = 1.0 / denom
        F = G * (a * a1 * C / fp) ** 2
        return SssPoint(r, t, self.gauge(s), S * a, F, G, J, s, False)

    def partials(self, r: float, t: float) -> tuple[float, float, float, float]:
        """(T_t, T_r, R_t, R_r) by forward-mode differentiation."""
        a, a1, a2 = evaluate_jet(self.sf, t)
        S, P, dP, C = self._radial(r)
        s0 = P + inverse_hubble_primitive(self.sf)(t)
        aa1 = a * a1
        # s as a jet in t: s' = 1/(a a'), s'' = -(a'^2 + a a'')/(a a')^2
        s_t = Jet2(s0, 1.0 / aa1, -(a1 * a1 + a * a2) / (aa1 * aa1))
        s_r = Jet2(s0, dP, 0.0)
        T_t = self.gauge.jet(s_t).d1
        T_r = self.gauge.jet(s_r).d1
        R_t = S * a1
        R_r = a * (C if self.geometry == HYPERBOLIC else 1.0)
        return T_t, T_r, R_t, R_r

    def degenerate_radius(self, t: float) -> float | None:
        """r on the degeneracy curve at time t, or None if there is none."""
        a1 = evaluate_jet(self.sf, t).d1
        if not a1 > 0.0:
            return None
        if self.geometry == EUCLIDEAN:
            return 1.0 / a1
        return math.atanh(1.0 / a1) if a1 > 1.0 else None


def sss_euclidean(sf: ScaleFactor, f: GaugeFunction = IDENTITY_GAUGE) -> SssChart:
    return SssChart(sf, EUCLIDEAN, f)


def sss_hyperbolic(sf: ScaleFactor, f: GaugeFunction = IDENTITY_GAUGE) -> SssChart:
    return SssChart(sf, HYPERBOLIC, f)


def identity_residuals(chart: SssChart, r: float, t: float) -> tuple[float, float, float]:
    """Scaled residuals of F T_t^2 - G R_t^2 = 1, F T_t T_r = G R_t R_r, F T_r^2 - G R_r^2 = -a^2.

    Each residual is divided by max(1, size of the terms involved).
    """
    p = chart.evaluate(r, t)
    T_t, T_r, R_t, R_r = chart.partials(r, t)
    a = chart.sf.value(t)
    out = []
    for lhs, rhs in (
        (p.F * T_t * T_t, 1.0 + p.G * R_t * R_t),
        (p.F * T_t * T_r, p.G * R_t * R_r),
        (p.F * T_r * T_r, p.G * R_r * R_r - a * a),
    ):
        out.append(abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
    return tuple(out)


def verify_sss_identities(
    chart: SssChart, grid: Iterable[Sequence[float]], margin: float = DEGENERACY_MARGIN
) -> float:
    """Max scaled residual of the three metric-matching identities over (r, t) ``grid``.

    Raises :class:`DegeneracyError` if a grid point is within ``margin`` in r
    of the degeneracy curve.
    """
    worst = 0.0
    for r, t in grid:
        r_star = chart.degenerate_radius(t)
        if r_star is not None and abs(r - r_star) < margin:
            raise DegeneracyError(f"grid point (r={r!r}, t={t!r}) within {margin} of the degeneracy curve r*={r_star!r}")
        worst = max(worst, *identity_residuals(chart, r, t))
    return worst


def pullback_residual(chart: SssChart, r: float, t: float) -> float:
    """Max |pullback of -F dT^2 + G dR^2 + R^2 dOmega^2 - FLRW metric| in the (t, r) block and angular factor."""
    p = chart.evaluate(r, t)
    T_t, T_r, R_t, R_r = chart.partials(r, t)
    jac = np.array([[T_t, T_r], [R_t, R_r]])
    pulled = jac.T @ np.diag([-p.F, p.G]) @ jac
    a = chart.sf.value(t)
    target = np.diag([-1.0, a * a])
    S = chart._radial(r)[0]
    scale = max(1.0, float(np.abs(pulled).max()))
    ang = abs(p.R**2 - (a * S) ** 2)
    return max(float(np.abs(pulled - target).max()) / scale, ang)


@dataclass(frozen=True)
class DegeneracyCurve:
    t: np.ndarray = field(compare=False)
    r_star: np.ndarray = field(compare=False)
    max_abs_j: float
    verified: bool


def degeneracy_curve(
    sf: ScaleFactor,
    f: GaugeFunction = IDENTITY_GAUGE,
    t_range: tuple[float, float] = (0.0, 1.0),
    n: int = 100,
    geometry: str = EUCLIDEAN,
    tol: float = 1e-9,
) -> DegeneracyCurve:
    """Samples of r*(t) (1/a' Euclidean, artanh(1/a') hyperbolic) with J checked there."""
    chart = SssChart(sf, geometry, f)
    ts = np.linspace(t_range[0], t_range[1], n)
    rs = np.empty(n)
    worst = 0.0
    for i, t in enumerate(ts):
        a1 = evaluate_jet(sf, float(t)).d1
        if not a1 > 0.0:
            raise HypothesisViolation(f"a'({t!r}) = {a1!r} is not positive")
        r_star = chart.degenerate_radius(float(t))
        if r_star is None:
            raise HypothesisViolation(f"no degeneracy at t={t!r}: hyperbolic case needs a' > 1")
        rs[i] = r_star
        j = chart.reduced_jacobian(r_star, a1)
        if t > 0.0:
            j *= f.derivative(chart.s(r_star, float(t)))
        worst = max(worst, abs(j))
    return DegeneracyCurve(ts, rs, worst, worst <= tol)


def g_along_R(sf: ScaleFactor, geometry: str, R_fixed: float, t: float) -> float:
    """G at the point of radius R_fixed at time t (inf where the chart degenerates)."""
    a, a1, _ = evaluate_jet(sf, t)
    if geometry == EUCLIDEAN:
        denom = a * a - R_fixed * R_fixed * a1 * a1
    else:
        denom = a * a + R_fixed * R_fixed * (1.0 - a1 * a1)
    if denom == 0.0:
        return math.inf
    return a * a / denom


def g_limit_along_R(
    sf: ScaleFactor, geometry: str, R_fixed: float, tol: float = 1e-6
) -> LimitEstimate:
    """Limit of |G| as t -> 0+ along the curve of constant areal radius R_fixed."""
    if not R_fixed > 0.0:
        raise ValueError("R_fixed must be positive")
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}")
    return limit_at_zero(lambda t: abs(g_along_R(sf, geometry, R_fixed, t)), tol=tol)


@dataclass(frozen=True)
class DegeneracyReport:
    geometry: str
    R_fixed: float
    a_prime_zero: LimitEstimate
    hypothesis_holds: bool
    g_limit: LimitEstimate
    s_limit: LimitEstimate | None = None
    s_diverges: bool | None = None
    sf2_limit: LimitEstimate | None = None
    t_limit: LimitEstimate | None = None
    t_diverges: bool | None = None
    a_over_a_prime: LimitEstimate | None = None
    a2_integral: LimitEstimate | None = None
    curve: DegeneracyCurve | None = None
    notes: tuple[str, ...] = ()

    @property
    def inconclusive(self) -> bool:
        return self.g_limit.verdict == INCONCLUSIVE

    def to_dict(self) -> dict:
        def est(x):
            return None if x is None else x.to_dict()

        out = {
            "geometry": self.geometry,
            "R_fixed": self.R_fixed,
            "a_prime_zero": est(self.a_prime_zero),
            "hypothesis_holds": self.hypothesis_holds,
            "diagnostic_only": not self.hypothesis_holds,
            "g_limit": est(self.g_limit),
            "s_limit": est(self.s_limit),
            "s_diverges": self.s_diverges,
            "sf2_limit": est(self.sf2_limit),
            "T_limit": est(self.t_limit),
            "T_diverges": self.t_diverges,
            "a_over_a_prime": est(self.a_over_a_prime),
            "a2_integral": est(self.a2_integral),
            "notes": list(self.notes),
        }
        if self.curve is not None:
            out["degeneracy_curve"] = {
                "samples": int(self.curve.t.size),
                "max_abs_J": self.curve.max_abs_j,
                "verified": self.curve.verified,
            }
        return out


def _check_gauge(f: GaugeFunction, s_values: Iterable[float]) -> None:
    for s in s_values:
        if not math.isfinite(s):
            continue
        try:
            fp = f.derivative(s)
        except DomainError as exc:
            raise GaugeError(f"gauge not differentiable at s={s!r}: {exc}") from exc
        if fp == 0.0 or not math.isfinite(fp):
            raise GaugeError(f"gauge derivative f'({s!r}) = {fp!r} is not a nonzero number")


def s_and_T_divergence(
    sf: ScaleFactor,
    f: GaugeFunction = IDENTITY_GAUGE,
    R_fixed: float = 1.0,
    tol: float = 1e-6,
) -> dict:
    """Euclidean limits along constant R: s, s^2 f'(s)^2, |T|, a/a' and a^2 I(t)."""
    if not R_fixed > 0.0:
        raise ValueError("R_fixed must be positive")
    prim = inverse_hubble_primitive(sf)

    def s_of(t: float) -> float:
        a = sf.value(t)
        return R_fixed * R_fixed / (2.0 * a * a) + prim(t)

    levels = 12
    _check_gauge(f, [s_of(0.5 * 2.0**-k) for k in range(levels)])

    def t_abs(t: float) -> float:
        try:
            return abs(f(s_of(t)))
        except DomainError:
            return math.inf

    s_lim = limit_at_zero(s_of, tol=tol)
    sf2 = limit_at_zero(lambda t: (s_of(t) * f.derivative(s_of(t))) ** 2, tol=tol)
    t_lim = limit_at_zero(t_abs, tol=tol)
    # the supporting limits converge slowly (t^2 log t); sample deeper
    ratio = limit_at_zero(lambda t: (lambda j: j.value / j.d1)(evaluate_jet(sf, t)), tol=tol, levels=20)
    a2i = limit_at_zero(lambda t: sf.value(t) ** 2 * prim(t), tol=tol, levels=20)
    return {
        "s_limit": s_lim,
        "s_diverges": s_lim.verdict == INFINITE and s_lim.value > 0,
        "sf2_limit": sf2,
        "t_limit": t_lim,
        "t_diverges": t_lim.verdict == INFINITE,
        "a_over_a_prime": ratio,
        "a2_integral": a2i,
    }


def analyze_sss(
    sf: ScaleFactor,
    geometry: str,
    R_fixed: float = 1.0,
    f: GaugeFunction = IDENTITY_GAUGE,
    t_range: tuple[float, float] = (0.01, 1.0),
    tol: float = 1e-6,
) -> DegeneracyReport:
    """All SSS diagnostics for one scale factor; hypothesis gate on a'(0)."""
    a0 = limit_at_zero(lambda t: evaluate_jet(sf, t).d1, tol=tol)
    notes = []
    if geometry == EUCLIDEAN:
        holds = a0.verdict == INFINITE or (a0.verdict == FINITE and a0.value > 0.0)
        if not holds:
            notes.append("a'(0) not in (0, inf]: the G -> 0 degeneracy argument does not apply, diagnostics only")
    else:
        holds = a0.verdict == INFINITE or (a0.verdict in (FINITE, ZERO) and abs(a0.value - 1.0) >= tol)
        if not holds:
            notes.append("a'(0) = 1 (or undetermined): the hyperbolic degeneracy argument needs a'(0) != 1, diagnostics only")
    g_lim = g_limit_along_R(sf, geometry, R_fixed, tol)
    extra = s_and_T_divergence(sf, f, R_fixed, tol) if geometry == EUCLIDEAN else {}
    curve = None
    try:
        curve = degeneracy_curve(sf, f, t_range, 100, geometry)
    except (HypothesisViolation, DomainError) as exc:
        notes.append(f"degeneracy curve not sampled: {exc}")
    return DegeneracyReport(
        geometry=geometry,
        R_fixed=R_fixed,
        a_prime_zero=a0,
        hypothesis_holds=holds,
        g_limit=g_lim,
        curve=curve,
        notes=tuple(notes),
        **extra,
    )


def write_sweep_csv(chart: SssChart, grid: Iterable[Sequence[float]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "t", "T", "R", "F", "G", "J", "singular"])
        for r, t in grid:
            p = chart.evaluate(r, t)
            w.writerow([repr(p.r), repr(p.t), repr(p.T), repr(p.R), repr(p.F), repr(p.G), repr(p.J), int(p.singular)])


def write_curve_csv(curve: DegeneracyCurve, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "r_star"])
        for t, r in zip(curve.t, curve.r_star):
            w.writerow([repr(float(t)), repr(float(r))])
