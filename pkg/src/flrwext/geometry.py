"""FLRW metrics, scalar curvature, conformal time and Lorentzian curve lengths.

Conventions: ``d`` is the number of spatial dimensions, so the spacetime has
dimension d + 1 and the round sphere factor is dOmega^2_{d-1}.  Points in the
``flrw`` chart are ``(t, r, theta_1, ..., theta_{d-1})``; missing angles
default to pi/2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .classifier import EUCLIDEAN, GEOMETRIES, HYPERBOLIC, conformal_time, integral_one_over_a_diverges
from .errors import CausalityError, DomainError, HypothesisViolation
from .numerics import quad
from .scale_factor import ScaleFactor, evaluate_jet


@dataclass(frozen=True)
class MetricValue:
    chart: str
    components: np.ndarray = field(compare=False)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def is_symmetric(self, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.components, self.components.T, rtol=0.0, atol=atol))

    def is_lorentzian(self) -> bool:
        """Exactly one negative eigenvalue and no zero ones."""
        ev = np.linalg.eigvalsh(self.components)
        scale = max(1.0, float(np.abs(ev).max()))
        return int((ev < 0).sum()) == 1 and bool(np.all(np.abs(ev) > 1e-14 * scale))

    def to_dict(self) -> dict:
        return {"chart": self.chart, "dim": self.dim, "components": self.components.tolist()}


def _spatial_profile(geometry: str, r: float) -> float:
    if geometry == EUCLIDEAN:
        return r
    if geometry == HYPERBOLIC:
        return math.sinh(r)
    raise ValueError(f"geometry must be one of {GEOMETRIES}")


def flrw_metric(
    sf: ScaleFactor, geometry: str, point: Sequence[float], d: int = 3
) -> MetricValue:
    """-dt^2 + a^2 [dr^2 + S(r)^2 dOmega^2] at ``point``, S = r or sinh r."""
    if d < 1:
        raise ValueError("d must be >= 1")
    t, r = float(point[0]), float(point[1])
    if not t > 0.0 or r < 0.0:
        raise DomainError(f"point (t={t!r}, r={r!r}) outside t > 0, r >= 0")
    angles = list(point[2:]) + [math.pi / 2] * (d - 1 - len(point[2:]))
    if len(angles) != d - 1:
        raise ValueError(f"expected at most {d - 1} angles, got {len(point) - 2}")
    a2 = sf.value(t) ** 2
    diag = [-1.0, a2]
    radial = a2 * _spatial_profile(geometry, r) ** 2
    sines = 1.0
    for theta in angles:
        diag.append(radial * sines)
        sines *= math.sin(theta) ** 2
    return MetricValue("flrw", np.diag(diag))


def curvature_terms(sf: ScaleFactor, geometry: str, d: int, t: float) -> tuple[float, ...]:
    """Summands of the (d+1)-dimensional FLRW Ricci scalar at time ``t``.

    d = 1: 2a''/a.  Hyperbolic: -d(d-1)/a^2 + 2d(a'/a)^2 + 2d a''/a + (d^2-3d)(a'/a)^2.
    Euclidean: 2d a''/a + d(d-1)(a'/a)^2.
    """
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}")
    if d < 1:
        raise ValueError("d must be >= 1")
    if not t > 0.0:
        raise DomainError("scalar curvature needs t > 0")
    a, a1, a2 = evaluate_jet(sf, t)
    if a == 0.0:
        raise DomainError(f"a({t!r}) = 0")
    if d == 1:
        return (2.0 * a2 / a,)
    h = a1 / a
    if geometry == HYPERBOLIC:
        return (-d * (d - 1) / a**2, 2 * d * h**2, 2 * d * a2 / a, (d * d - 3 * d) * h**2)
    return (2 * d * a2 / a, d * (d - 1) * h**2)


def scalar_curvature(sf: ScaleFactor, geometry: str, d: int, t: float) -> float:
    """Ricci scalar of the (d+1)-dimensional FLRW metric at time ``t``."""
    return math.fsum(curvature_terms(sf, geometry, d, t))


def curvature_scale(sf: ScaleFactor, geometry: str, d: int, t: float) -> float:
    """Size of the terms that cancel in the Ricci scalar; the yardstick for relative errors.

    Includes (a'/a)^2 even for d = 1, where it enters the Christoffel symbols.
    """
    a, a1, _ = evaluate_jet(sf, t)
    terms = curvature_terms(sf, geometry, d, t)
    return max(max(abs(x) for x in terms), (a1 / a) ** 2)


def numeric_ricci_scalar(
    metric: Callable[[np.ndarray], np.ndarray], x: Sequence[float], h: float = 1e-4
) -> float:
    """Ricci scalar from metric components alone, by nested central differences.

    Christoffel symbols use second-order central differences of g; their
    derivatives use central differences of the Christoffels.  Independent of
    any closed-form curvature expression.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    eye = np.eye(n)

    def dmetric(y):
        return np.array([(metric(y + h * eye[k]) - metric(y - h * eye[k])) / (2 * h) for k in range(n)])

    def christoffel(y):
        gi = np.linalg.inv(metric(y))
        dg = dmetric(y)  # dg[k, i, j] = d_k g_ij
        lowered = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg  # [d, b, c]
        return 0.5 * np.einsum("ad,dbc->abc", gi, lowered)

    gam = christoffel(x)
    dgam = np.array([(christoffel(x + h * eye[k]) - christoffel(x - h * eye[k])) / (2 * h) for k in range(n)])
    ricci = (
        np.einsum("aabc->bc", dgam)
        - np.einsum("caba->bc", dgam)
        + np.einsum("aad,dbc->bc", gam, gam)
        - np.einsum("acd,dab->bc", gam, gam)
    )
    return float(np.einsum("bc,bc->", np.linalg.inv(metric(x)), ricci))


def flrw_ricci_scalar_fd(sf: ScaleFactor, geometry: str, d: int, t: float, r: float = 0.7, h: float = 1e-4) -> float:
    """Finite-difference Ricci scalar of :func:`flrw_metric` at (t, r, generic angles)."""
    point = [t, r] + [1.1] * (d - 1)
    return numeric_ricci_scalar(lambda y: flrw_metric(sf, geometry, y, d).components, point, h)


# -- conformal time -------------------------------------------------------------


def tau_of_t(sf: ScaleFactor, t: float, c: float = 1.0) -> float:
    """tau = integral_c^t ds / a(s); at t = 0 returns -inf when the integral diverges."""
    if c <= 0.0:
        raise DomainError("reference time c must be positive")
    if t == 0.0:
        if integral_one_over_a_diverges(sf):
            return -math.inf
        return -quad(lambda s: 1.0 / sf.value(s), 0.0, c)
    if t < 0.0:
        raise DomainError("conformal time is defined for t > 0")
    return conformal_time(sf, float(c))(t)


def t_of_tau(sf: ScaleFactor, tau: float, c: float = 1.0) -> float:
    """Inverse of :func:`tau_of_t`; raises :class:`OutOfRangeError` outside its range."""
    if c <= 0.0:
        raise DomainError("reference time c must be positive")
    return conformal_time(sf, float(c)).inverse(tau)


# -- curves -------------------------------------------------------------------

CHARTS = ("flrw", "cartesian", "conformal", "conformal_physical")


@dataclass(frozen=True)
class CurvePath:
    """Sampled curve: ``points[i]`` are chart coordinates at ``params[i]``.

    Charts: ``flrw`` (t, r, angles), ``cartesian`` (t, x_1..x_d; Euclidean),
    ``conformal`` (tau, x_1..x_d) with metric -dtau^2 + |dx|^2, and
    ``conformal_physical`` (tau, x) with metric a^2(t(tau)) (-dtau^2 + |dx|^2).
    """

    params: np.ndarray = field(compare=False)
    points: np.ndarray = field(compare=False)
    chart: str = "conformal"

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float)
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        if self.chart not in CHARTS:
            raise ValueError(f"chart must be one of {CHARTS}")
        if params.ndim != 1 or points.shape[0] != params.size or params.size < 2:
            raise ValueError("need at least two samples with one point per parameter")
        if np.any(np.diff(params) <= 0.0):
            raise ValueError("curve parameter must be strictly increasing")

    @classmethod
    def from_csv(cls, path: str | Path, chart: str = "conformal") -> "CurvePath":
        """Read columns ``param, coord_0, ..., coord_d``."""
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
        if rows and not _is_float(rows[0][0]):
            rows = rows[1:]
        data = np.array([[float(v) for v in row] for row in rows])
        return cls(data[:, 0], data[:, 1:], chart)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["param"] + [f"coord_{i}" for i in range(self.points.shape[1])])
            for p, x in zip(self.params, self.points):
                w.writerow([repr(float(p))] + [repr(float(v)) for v in x])


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _curve_metric(sf: ScaleFactor | None, geometry: str, chart: str, x: np.ndarray) -> np.ndarray:
    if chart == "flrw":
        return flrw_metric(sf, geometry, x, d=x.size - 1).components
    if chart == "conformal":
        return np.diag([-1.0] + [1.0] * (x.size - 1))
    if geometry != EUCLIDEAN:
        raise HypothesisViolation(f"chart {chart!r} assumes flat spatial slices")
    if chart == "cartesian":
        a2 = sf.value(x[0]) ** 2
        return np.diag([-1.0] + [a2] * (x.size - 1))
    a2 = sf.value(t_of_tau(sf, x[0])) ** 2
    return a2 * np.diag([-1.0] + [1.0] * (x.size - 1))


def lorentzian_length(sf: ScaleFactor | None, geometry: str, curve: CurvePath) -> float:
    """Proper time along a sampled timelike curve.

    Tangents are central differences at interior samples and one-sided at the
    ends; the integrand sqrt(-g(v, v)) is integrated by composite Simpson.
    """
    params, pts = curve.params, curve.points
    edge = 2 if params.size >= 3 else 1
    vel = np.gradient(pts, params, axis=0, edge_order=edge)
    speeds = np.empty(params.size)
    for i, (x, v) in enumerate(zip(pts, vel)):
        q = float(v @ _curve_metric(sf, geometry, curve.chart, x) @ v)
        if not q < 0.0:
            raise CausalityError(f"curve is not timelike at parameter {float(params[i])!r} (g(v,v) = {q!r})")
        speeds[i] = math.sqrt(-q)
    if params.size == 2:
        return float(integrate.trapezoid(speeds, params))
    return float(integrate.simpson(speeds, x=params))


# -- future divergence ------------------------------------------------------------


@dataclass(frozen=True)
class DistanceBound:
    tau0: float
    T: float
    d_h: float
    bound: float


def distance_lower_bound(tau0: float, T: float, d_h: float) -> DistanceBound:
    """sqrt((T - tau0)^2 - d_h^2): proper time of the lifted minimizing geodesic."""
    if not T > tau0:
        raise CausalityError(f"need T > tau0, got T={T!r}, tau0={tau0!r}")
    if d_h < 0.0:
        raise ValueError("d_h must be non-negative")
    dt = T - tau0
    if not d_h < dt:
        raise CausalityError(f"endpoints are not timelike separated (d_h={d_h!r} >= T - tau0={dt!r})")
    return DistanceBound(tau0, T, d_h, math.sqrt((dt - d_h) * (dt + d_h)))


def divergence_table(eps: float, tau0: float, Ts: Sequence[float]) -> list[DistanceBound]:
    """Bounds with d_h = T - tau0 - eps, i.e. sqrt(2 eps (T - tau0) - eps^2)."""
    return [distance_lower_bound(tau0, T, T - tau0 - eps) for T in Ts]


# -- geodesic lifts ---------------------------------------------------------------


@dataclass(frozen=True)
class LiftReport:
    n_lifts: int
    max_curve_speed: float
    max_lift_speed: float
    chord_within_arc: bool
    all_timelike: bool
    lift_lengths: tuple[float, ...]
    physical_final_length: float | None = None

    @property
    def ok(self) -> bool:
        return self.chord_within_arc and self.all_timelike and self.max_lift_speed < 1.0


def _check_conformal_polyline(curve: CurvePath) -> tuple[np.ndarray, np.ndarray]:
    if curve.chart not in ("conformal", "conformal_physical"):
        raise ValueError("geodesic lifts need a curve in conformal coordinates (tau, x)")
    dtau = np.diff(curve.params)
    seg = np.linalg.norm(np.diff(curve.points[:, 1:], axis=0), axis=1)
    if not np.allclose(curve.points[:, 0], curve.params, rtol=0.0, atol=1e-12):
        raise ValueError("curve must be parameterized by conformal time (coord_0 == param)")
    speed = seg / dtau
    bad = np.flatnonzero(speed >= 1.0)
    if bad.size:
        raise CausalityError(f"input curve is not timelike on segment starting at tau={curve.params[bad[0]]!r}")
    return seg, speed


def lift_path(curve: CurvePath, j: int, samples: int = 65) -> CurvePath:
    """sigma_s for s = params[j]: straight segment from xbar(tau0) to xbar(s), in tau."""
    tau0, s = curve.params[0], curve.params[j]
    x0, x1 = curve.points[0, 1:], curve.points[j, 1:]
    taus = np.linspace(tau0, s, samples)
    frac = (taus - tau0) / (s - tau0)
    xs = x0[None, :] + frac[:, None] * (x1 - x0)[None, :]
    return CurvePath(taus, np.column_stack([taus, xs]), curve.chart)


def geodesic_lift_check(
    sf: ScaleFactor | None, geometry: str, curve: CurvePath
) -> LiftReport:
    """Check every straight-segment lift of a timelike polyline in flat conformal FLRW.

    For each sample s the lift runs along the chord from xbar(tau0) to
    xbar(s) at constant speed chord/(s - tau0), which is at most
    arc/(s - tau0) < 1.  Timelikeness is conformally invariant, so a(t) only
    enters through the optional physical length of the final lift (needs sf).
    """
    if geometry != EUCLIDEAN:
        raise HypothesisViolation("lift check is restricted to flat spatial slices")
    seg, speed = _check_conformal_polyline(curve)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    tau0 = curve.params[0]
    x0 = curve.points[0, 1:]
    elapsed = curve.params[1:] - tau0
    chord = np.linalg.norm(curve.points[1:, 1:] - x0, axis=1)
    lift_speed = chord / elapsed
    arc_speed = arc[1:] / elapsed
    within = bool(np.all(lift_speed <= arc_speed * (1.0 + 1e-12) + 1e-15))
    timelike = bool(np.all(lift_speed < 1.0))
    lengths = tuple(float(v) for v in np.sqrt(np.maximum(elapsed**2 - chord**2, 0.0)))
    physical = None
    if sf is not None:
        final = lift_path(curve, curve.params.size - 1, samples=33)
        final = CurvePath(final.params, final.points, "conformal_physical")
        physical = lorentzian_length(sf, EUCLIDEAN, final)
    return LiftReport(
        n_lifts=int(elapsed.size),
        max_curve_speed=float(speed.max()),
        max_lift_speed=float(lift_speed.max()),
        chord_within_arc=within,
        all_timelike=timelike,
        lift_lengths=lengths,
        physical_final_length=physical,
    )


def random_timelike_polyline(
    rng: np.random.Generator,
    n_vertices: int = 20,
    spatial_dim: int = 3,
    max_speed: float = 0.99,
    tau0: float = 0.0,
) -> CurvePath:
    """Random polyline in (tau, x) whose segments all have speed < max_speed."""
    dtau = rng.uniform(0.05, 1.0, n_vertices - 1)
    direction = rng.normal(size=(n_vertices - 1, spatial_dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    speed = rng.uniform(0.0, max_speed, n_vertices - 1)
    steps = direction * (speed * dtau)[:, None]
    taus = tau0 + np.concatenate([[0.0], np.cumsum(dtau)])
    xs = np.vstack([np.zeros(spatial_dim), np.cumsum(steps, axis=0)])
    return CurvePath(taus, np.column_stack([taus, xs]), "conformal")
