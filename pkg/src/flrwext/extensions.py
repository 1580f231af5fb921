"""Continuous extensions through t = 0: the 2D null chart and the Milne-like chart.

Null chart (d = 1):  t~ = int_0^t a,  x~ = x - int_1^t 1/a,
    g = 2 dt~ dx~ + a(t(t~))^2 dx~^2,  det g = -1.
Milne-like chart:   T = b(t) cosh r,  R = b(t) sinh r,  b = gauge * exp(int_1^t 1/a),
    g = Omega^2 (-dT^2 + dR^2 + R^2 dOmega^2),  Omega^2 = 1/b'(t(T, R))^2,
with Omega^2 frozen at 1/b'(0)^2 on and beyond the light cone T = R.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, optimize

from .classifier import (
    HYPERBOLIC,
    area_primitive,
    b_prime_at_zero,
    classify_milne_like,
    conformal_time,
)
from .errors import DomainError, HypothesisViolation, OutOfRangeError, RegionError
from .geometry import flrw_metric
from .numerics import LimitEstimate, limit_at_zero, quad
from .scale_factor import EVEN_REFLECTION, ScaleFactor, evaluate_jet

ORIGINAL = "original"
BOUNDARY = "boundary"
PAST = "past"

MIN_VERIFY_TIME = 1e-8

# gauge constants b(1) giving b = sinh t and b = t/(1 + t), whose conformal factors have closed forms
EXAMPLE_GAUGES = {"tanh(t)": math.sinh(1.0), "t+t^2": 0.5}


class ExtensionChart:
    """Common interface: maps between original and extension coordinates."""

    name = "chart"
    dim = 2

    def __init__(self, sf: ScaleFactor):
        self.sf = sf

    def forward(self, point: Sequence[float]) -> np.ndarray:
        raise NotImplementedError

    def _map(self, x: np.ndarray) -> np.ndarray:
        # forward without the domain guard, so stencils may straddle r = 0
        return self.forward(x)

    def inverse(self, point: Sequence[float]) -> np.ndarray:
        raise NotImplementedError

    def forward_jacobian(self, point: Sequence[float]) -> np.ndarray:
        raise NotImplementedError

    def metric(self, point: Sequence[float]) -> np.ndarray:
        raise NotImplementedError

    def region(self, point: Sequence[float]) -> str:
        raise NotImplementedError

    def original_metric(self, point: Sequence[float]) -> np.ndarray:
        raise NotImplementedError

    def conformal_factor(self, point: Sequence[float]) -> float:
        raise TypeError(f"{self.name} chart is not conformally flat")

    def complete(self, point: Sequence[float]) -> np.ndarray:
        """Pad omitted angular coordinates with pi/2."""
        x = [float(v) for v in point]
        return np.array(x + [math.pi / 2] * (self.dim - len(x)))

    def fd_jacobian(self, point: Sequence[float], h: float = 1e-5) -> np.ndarray:
        """Central-difference differential of :meth:`forward`."""
        x = self.complete(point)
        cols = []
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = h * max(1.0, abs(x[k]))
            cols.append((self._map(x + e) - self._map(x - e)) / (2 * e[k]))
        return np.column_stack(cols)


class NullChart2D(ExtensionChart):
    """(t, x) -> (t~, x~) for a 1+1 dimensional FLRW spacetime."""

    name = "null2d"
    dim = 2

    def __init__(self, sf: ScaleFactor):
        super().__init__(sf)
        self._area = area_primitive(sf)
        self._tau = conformal_time(sf, 1.0)

    def forward(self, point):
        t, x = float(point[0]), float(point[1])
        if not t > 0.0:
            raise DomainError("original region is t > 0")
        return np.array([self._area(t), x - self._tau(t)])

    def time_of(self, t_tilde: float) -> float:
        """t with int_0^t a = t~, using the past extension of a for t~ < 0."""
        if t_tilde == 0.0:
            return 0.0
        if t_tilde > 0.0:
            return self._area.inverse(t_tilde)
        if self.sf.past_extension_rule == EVEN_REFLECTION:
            return -self._area.inverse(-t_tilde)
        return self._past_time(t_tilde)

    def _past_time(self, t_tilde: float) -> float:
        # solve -int_t^0 a = t~ on a doubling bracket
        def resid(t):
            return -quad(self.sf.value, t, 0.0) - t_tilde

        hi = -1e-300
        lo = -1.0
        while resid(lo) > 0.0:
            lo *= 2.0
            if lo < -2.0**60:
                raise OutOfRangeError(f"t~ = {t_tilde!r} beyond the past extension")
        return optimize.brentq(resid, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)

    def inverse(self, point):
        tt, xt = float(point[0]), float(point[1])
        if self.region(point) != ORIGINAL:
            raise RegionError(f"({tt!r}, {xt!r}) is not in the original region", self.region(point))
        t = self._area.inverse(tt)
        return np.array([t, xt + self._tau(t)])

    def forward_jacobian(self, point):
        t = float(point[0])
        a = self.sf.value(t)
        # d t~ = a dt ; d x~ = dx - dt / a
        return np.array([[a, 0.0], [-1.0 / a, 1.0]])

    def metric(self, point):
        a = self.sf.value(self.time_of(float(point[0])))
        return np.array([[0.0, 1.0], [1.0, a * a]])

    def region(self, point):
        tt = float(point[0])
        if tt > 0.0:
            return ORIGINAL
        return BOUNDARY if tt == 0.0 else PAST

    def original_metric(self, point):
        a = self.sf.value(float(point[0]))
        return np.diag([-1.0, a * a])

    def scalar_curvature(self, t_tilde: float) -> float:
        """2 a''/a at t(t~), the curvature of the original region."""
        t = self.time_of(t_tilde)
        a, _, a2 = evaluate_jet(self.sf, t)
        if a == 0.0:
            raise DomainError("curvature undefined where a = 0")
        return 2.0 * a2 / a


class MilneChart(ExtensionChart):
    """(t, r, angles) -> (T, R, angles) for a Milne-like hyperbolic FLRW spacetime."""

    name = "milne"

    def __init__(self, sf: ScaleFactor, gauge: float = 1.0, d: int = 3, tol: float = 1e-6):
        super().__init__(sf)
        if not gauge > 0.0:
            raise ValueError("gauge constant must be positive")
        if d < 1:
            raise ValueError("d must be >= 1")
        self.gauge = float(gauge)
        self.d = d
        self.dim = d + 1
        self._tau = conformal_time(sf, 1.0)
        est = b_prime_at_zero(sf, self.gauge, tol)
        if not (est.conclusive and math.isfinite(est.value) and est.value > 0.0):
            raise HypothesisViolation(f"b'(0) is not finite and positive ({est.verdict})")
        self.b_prime_zero = est

    def b(self, t: float) -> float:
        return self.gauge * math.exp(self._tau(t))

    def b_prime(self, t: float) -> float:
        return self.b(t) / self.sf.value(t)

    def time_of_b(self, b_val: float) -> float:
        if not b_val > 0.0:
            raise DomainError("b must be positive")
        return self._tau.inverse(math.log(b_val / self.gauge))

    def _split(self, point):
        p = [float(v) for v in point]
        if len(p) > self.d + 1:
            raise ValueError(f"expected at most {self.d + 1} coordinates")
        return p[0], p[1], p[2:] + [math.pi / 2] * (self.d + 1 - len(p))

    def forward(self, point):
        t, r, angles = self._split(point)
        if not t > 0.0 or r < 0.0:
            raise DomainError("original region is t > 0, r >= 0")
        return self._map(np.array([t, r] + angles))

    def _map(self, x):
        b = self.b(float(x[0]))
        return np.concatenate([[b * math.cosh(x[1]), b * math.sinh(x[1])], x[2 : self.dim]])

    def inverse(self, point):
        T, R, angles = self._split(point)
        where = self.region(point)
        if where != ORIGINAL:
            raise RegionError(f"(T, R) = ({T!r}, {R!r}) is not in the original region", where)
        b_val = math.sqrt((T - R) * (T + R))
        return np.array([self.time_of_b(b_val), math.atanh(R / T)] + angles)[: self.dim]

    def forward_jacobian(self, point):
        t, r, _ = self._split(point)
        b = self.b(t)
        bp = b / self.sf.value(t)
        jac = np.eye(self.dim)
        ch, sh = math.cosh(r), math.sinh(r)
        jac[0, 0], jac[0, 1] = bp * ch, b * sh
        jac[1, 0], jac[1, 1] = bp * sh, b * ch
        return jac

    def region(self, point):
        T, R = float(point[0]), float(point[1])
        if R < 0.0:
            raise DomainError("R is a radius and must be >= 0")
        if T > R:
            return ORIGINAL
        return BOUNDARY if T == R else PAST

    def conformal_factor(self, point) -> float:
        T, R = float(point[0]), float(point[1])
        if self.region(point) != ORIGINAL:
            return 1.0 / self.b_prime_zero.value**2
        b_val = math.sqrt((T - R) * (T + R))
        t = self.time_of_b(b_val)
        bp = b_val / self.sf.value(t)
        return 1.0 / (bp * bp)

    def metric(self, point):
        _, R, angles = self._split(point)
        omega2 = self.conformal_factor(point)
        diag = [-1.0, 1.0]
        sines = 1.0
        for theta in angles[: self.d - 1]:
            diag.append(R * R * sines)
            sines *= math.sin(theta) ** 2
        return omega2 * np.diag(diag)

    def original_metric(self, point):
        return flrw_metric(self.sf, HYPERBOLIC, point, self.d).components

    def boundary_limit(self, R: float = 0.5, tol: float = 1e-6) -> LimitEstimate:
        """Limit of the conformal factor as sqrt(T^2 - R^2) -> 0+ at fixed R."""
        return limit_at_zero(lambda b: self.conformal_factor((math.sqrt(R * R + b * b), R)), tol=tol)


def build_2d_null_extension(sf: ScaleFactor) -> NullChart2D:
    return NullChart2D(sf)


def build_milne_extension(
    sf: ScaleFactor, gauge: float = 1.0, d: int = 3, tol: float = 1e-6
) -> MilneChart:
    """Milne-like chart; rejects scale factors that are not classified Milne-like."""
    report = classify_milne_like(sf, tol)
    if not report.is_milne_like:
        why = "classification inconclusive" if report.inconclusive else "conditions fail"
        raise HypothesisViolation(f"scale factor {sf} is not Milne-like ({why})")
    return MilneChart(sf, gauge, d, tol)


def invert_milne(chart: MilneChart, T: float, R: float) -> tuple[float, float]:
    """(t, r) from (T, R); raises :class:`RegionError` carrying the region tag off the original region."""
    t, r = chart.inverse((T, R))[:2]
    return float(t), float(r)


# -- verification ----------------------------------------------------------------


def verify_isometry(
    chart: ExtensionChart, grid: Iterable[Sequence[float]], differential: str = "analytic"
) -> float:
    """Max |J^T g_ext(forward(p)) J - g_FLRW(p)| over ``grid`` (original coordinates).

    ``differential`` is ``"analytic"`` (closed-form Jacobian) or ``"fd"``.
    """
    worst = 0.0
    for p in grid:
        p = chart.complete(p)
        if not p[0] >= MIN_VERIFY_TIME:
            raise DomainError(f"grid point t = {p[0]!r} too close to the big bang")
        jac = chart.forward_jacobian(p) if differential == "analytic" else chart.fd_jacobian(p)
        pulled = jac.T @ chart.metric(chart.forward(p)) @ jac
        worst = max(worst, float(np.abs(pulled - chart.original_metric(p)).max()))
    return worst


def metric_determinants(chart: NullChart2D, points: Iterable[Sequence[float]]) -> np.ndarray:
    return np.array([np.linalg.det(chart.metric(p)) for p in points])


@dataclass(frozen=True)
class BoundaryDiagnostic:
    n: int
    slice_length: float
    ratio_to_a: float


def boundary_slice_length(
    chart: ExtensionChart, n: int, r_interval: tuple[float, float] = (0.0, 1.0)
) -> BoundaryDiagnostic:
    """Length, in the extended metric, of the image of {t = 1/n} x r_interval."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r0, r1 = map(float, r_interval)
    if r1 < r0:
        raise ValueError("r_interval must be increasing")
    t = 1.0 / n

    def speed(r):
        p = np.array([t, r] + [math.pi / 2] * (chart.dim - 2))
        v = chart.forward_jacobian(p)[:, 1]
        q = float(v @ chart.metric(chart.forward(p)) @ v)
        return math.sqrt(max(q, 0.0))

    length, _err = integrate.quad(speed, r0, r1, epsabs=1e-14, epsrel=1e-10, limit=100)
    return BoundaryDiagnostic(n, length, length / chart.sf.value(t))


# -- closed forms and export ------------------------------------------------------------


def closed_form_factor(source: str, T: float, R: float) -> float | None:
    """Closed-form conformal factor for tanh(t) (b = sinh t) and t + t^2 (b = t/(1+t)), else None."""
    key = source.replace(" ", "")
    q = (T - R) * (T + R)
    if key == "tanh(t)":
        return 1.0 / (1.0 + q)
    if key == "t+t^2":
        return (1.0 - math.sqrt(q)) ** -4
    return None


def known_gauge(source: str) -> float | None:
    """Gauge constant under which ``source`` has a closed-form conformal factor, if any."""
    return EXAMPLE_GAUGES.get(source.replace(" ", ""))


def milne_grid(n_b: int, n_r: int, b_max: float = 0.9, r_max: float = 2.0) -> list[tuple[float, float]]:
    """(T, R) points of the original region, uniform in b = sqrt(T^2 - R^2) and rapidity."""
    out = []
    for b in np.linspace(b_max / n_b, b_max, n_b):
        for r in np.linspace(0.0, r_max, n_r):
            out.append((float(b * math.cosh(r)), float(b * math.sinh(r))))
    return out


def write_factor_csv(chart: MilneChart, points: Iterable[Sequence[float]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["T", "R", "factor", "region"])
        for T, R in points:
            w.writerow([repr(T), repr(R), repr(chart.conformal_factor((T, R))), chart.region((T, R))])
