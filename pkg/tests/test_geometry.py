from __future__ import annotations

import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from flrwext.errors import CausalityError, DomainError, OutOfRangeError
from flrwext.geometry import (
    CurvePath,
    curvature_scale,
    distance_lower_bound,
    divergence_table,
    flrw_metric,
    flrw_ricci_scalar_fd,
    geodesic_lift_check,
    lift_path,
    lorentzian_length,
    numeric_ricci_scalar,
    random_timelike_polyline,
    scalar_curvature,
    t_of_tau,
    tau_of_t,
)
from flrwext.scale_factor import parse_scale_factor as sf

TEST_FACTORS = ["t", "sqrt(t)", "t + t^2", "tanh(t)", "t^1.5 + t", "sinh(t) * exp(-t/3)"]


def _symbolic_ricci(a_expr, d, hyperbolic):
    """Ricci scalar of -dt^2 + a^2 (dr^2 + S^2 dOmega^2) from the metric, with sympy."""
    t, r = sympy.symbols("t r", positive=True)
    thetas = sympy.symbols(f"th1:{d}", positive=True)
    coords = [t, r, *thetas]
    S = sympy.sinh(r) if hyperbolic else r
    a = a_expr(t)
    diag = [-1, a**2]
    radial = a**2 * S**2
    sines = 1
    for th in thetas:
        diag.append(radial * sines)
        sines *= sympy.sin(th) ** 2
    n = len(coords)
    g = sympy.diag(*diag)
    gi = g.inv()
    gam = [[[sum(gi[i, l] * (sympy.diff(g[l, j], coords[k]) + sympy.diff(g[l, k], coords[j])
                             - sympy.diff(g[j, k], coords[l])) for l in range(n)) / 2
             for k in range(n)] for j in range(n)] for i in range(n)]
    ric = 0
    for b in range(n):
        for c in range(n):
            rbc = sum(sympy.diff(gam[i][b][c], coords[i]) - sympy.diff(gam[i][b][i], coords[c])
                      + sum(gam[i][i][e] * gam[e][b][c] - gam[i][c][e] * gam[e][b][i] for e in range(n))
                      for i in range(n))
            ric += gi[b, c] * rbc
    return sympy.simplify(ric), t


def test_metric_signature_and_shape():
    m = flrw_metric(sf("t"), "hyperbolic", (1.0, 0.5), d=3)
    assert m.components.shape == (4, 4)
    assert m.is_lorentzian() and m.is_symmetric()
    assert m.components[1, 1] == 1.0
    assert m.components[2, 2] == pytest.approx(math.sinh(0.5) ** 2)
    with pytest.raises(DomainError):
        flrw_metric(sf("t"), "euclidean", (0.0, 0.5))


@pytest.mark.parametrize("hyperbolic", [False, True])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_curvature_formula_against_symbolic_ricci(d, hyperbolic):
    ric, t = _symbolic_ricci(lambda x: x + x**2, d, hyperbolic)
    geo = "hyperbolic" if hyperbolic else "euclidean"
    for tv in (0.1, 0.7, 2.0):
        assert scalar_curvature(sf("t + t^2"), geo, d, tv) == pytest.approx(float(ric.subs(t, tv)), rel=1e-12)


def test_quadratic_example_has_leading_term_4d_squared():
    # symbolic oracle: for a = t + t^2, hyperbolic, d = 3 the Ricci scalar is exactly 36/(t + t^2)
    ric, t = _symbolic_ricci(lambda x: x + x**2, 3, True)
    assert sympy.simplify(ric - 36 / (t + t**2)) == 0
    val = scalar_curvature(sf("t + t^2"), "hyperbolic", 3, 1e-4)
    assert val * (1e-4 + 1e-8) / (4 * 3) == pytest.approx(3.0, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(TEST_FACTORS),
    st.sampled_from(["euclidean", "hyperbolic"]),
    st.integers(min_value=1, max_value=3),
    st.floats(min_value=0.1, max_value=2.0),
)
def test_curvature_against_finite_differences(src, geo, d, t):
    exact = scalar_curvature(sf(src), geo, d, t)
    approx = flrw_ricci_scalar_fd(sf(src), geo, d, t)
    # relative to the cancelling terms, since R itself may vanish (Milne, a = t in d = 1)
    assert abs(exact - approx) <= 1e-4 * max(abs(exact), curvature_scale(sf(src), geo, d, t))


def test_numeric_ricci_of_round_sphere():
    # unit 2-sphere: R = 2
    metric = lambda x: np.diag([1.0, math.sin(x[0]) ** 2])
    assert numeric_ricci_scalar(metric, [1.0, 0.3]) == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 3.0, 10.0])
def test_milne_is_flat(d, t):
    assert abs(scalar_curvature(sf("t"), "hyperbolic", d, t)) < 1e-9


def test_two_dimensional_curvature_of_sqrt():
    for t in (0.01, 0.1, 1.0):
        assert scalar_curvature(sf("sqrt(t)"), "euclidean", 1, t) == pytest.approx(-0.5 / t**2, rel=1e-12)


def test_conformal_time_examples():
    assert tau_of_t(sf("t"), math.e) == pytest.approx(1.0, rel=1e-14)
    assert tau_of_t(sf("1 + 0*t"), 3.0) == pytest.approx(2.0, rel=1e-14)
    assert tau_of_t(sf("tanh(t)"), 0.0) == -math.inf
    # finite past for sqrt: int_0^1 s^-1/2 = 2
    assert tau_of_t(sf("sqrt(t)"), 0.0) == pytest.approx(-2.0, rel=1e-10)
    # cross-check against ln sinh
    for t in (1e-6, 0.2, 4.0):
        want = math.log(math.sinh(t)) - math.log(math.sinh(1.0))
        assert tau_of_t(sf("tanh(t)"), t) == pytest.approx(want, rel=1e-12, abs=1e-12)
    assert t_of_tau(sf("t"), 1.0) == pytest.approx(math.e, rel=1e-14)
    assert t_of_tau(sf("t"), 0.0) == 1.0
    with pytest.raises(OutOfRangeError):
        t_of_tau(sf("sqrt(t)"), -3.0)
    with pytest.raises(OutOfRangeError):
        t_of_tau(sf("t + t^2"), 0.7)


def test_tau_round_trip_100_values():
    rng = np.random.default_rng(7)
    a = sf("t + t^2")
    for tau in rng.uniform(-15.0, 0.69, 100):  # tau(inf) = ln 2
        assert tau_of_t(a, t_of_tau(a, float(tau))) == pytest.approx(tau, abs=1e-10)


def test_length_examples():
    line = CurvePath([1.0, 2.0, 3.0], [[1.0, 0.3], [2.0, 0.3], [3.0, 0.3]], "flrw")
    assert lorentzian_length(sf("1 + 0*t"), "euclidean", line) == pytest.approx(2.0, rel=1e-14)

    ts = np.linspace(1.0, 2.0, 201)
    radial = CurvePath(ts, np.column_stack([ts, 0.5 * np.log(ts)]), "flrw")  # a r' = 1/2
    length = lorentzian_length(sf("t"), "hyperbolic", radial)
    assert length == pytest.approx(math.sqrt(0.75), rel=1e-5)  # sampled tangents
    assert length < 1.0

    taus = np.linspace(0.0, 5.0, 101)
    conf = CurvePath(taus, np.column_stack([taus, 0.6 * taus, np.zeros_like(taus)]), "conformal")
    assert lorentzian_length(None, "euclidean", conf) == pytest.approx(4.0, rel=1e-12)


def test_spacelike_sample_is_named():
    ts = np.linspace(0.0, 1.0, 11)
    xs = np.where(ts < 0.5, 0.5 * ts, 0.25 + 2.0 * (ts - 0.5))
    curve = CurvePath(ts, np.column_stack([ts, xs]), "conformal")
    with pytest.raises(CausalityError, match="parameter 0.5"):
        lorentzian_length(None, "euclidean", curve)


def test_curve_csv_round_trip(tmp_path):
    curve = random_timelike_polyline(np.random.default_rng(1), 6, 2)
    path = tmp_path / "curve.csv"
    curve.to_csv(path)
    back = CurvePath.from_csv(path, "conformal")
    np.testing.assert_array_equal(back.params, curve.params)
    np.testing.assert_array_equal(back.points, curve.points)


def test_distance_bound_examples():
    assert distance_lower_bound(0.0, 5.0, 0.0).bound == 5.0
    assert distance_lower_bound(0.0, 5.0, 3.0).bound == pytest.approx(4.0, rel=1e-15)
    with pytest.raises(CausalityError):
        distance_lower_bound(0.0, 5.0, 5.0)
    rows = divergence_table(0.1, 0.0, [1.0, 10.0, 100.0, 1000.0])
    want = [math.sqrt(0.2 * T - 0.01) for T in (1.0, 10.0, 100.0, 1000.0)]
    assert [r.bound for r in rows] == pytest.approx(want, rel=1e-12)
    assert [round(r.bound, 3) for r in rows] == [0.436, 1.411, 4.471, 14.142]


@settings(max_examples=100, deadline=None)
@given(
    st.floats(min_value=-5, max_value=5),
    st.floats(min_value=0.0, max_value=10.0),
    st.floats(min_value=0.01, max_value=50.0),
    st.floats(min_value=0.01, max_value=50.0),
)
def test_bound_monotone_in_T(tau0, d_h, gap, extra):
    T1 = tau0 + d_h + gap
    T2 = T1 + extra
    assert distance_lower_bound(tau0, T2, d_h).bound > distance_lower_bound(tau0, T1, d_h).bound


def test_lift_of_straight_curve_is_itself():
    taus = np.linspace(0.0, 4.0, 9)
    straight = CurvePath(taus, np.column_stack([taus, 0.7 * taus, 0.1 * taus]), "conformal")
    rep = geodesic_lift_check(None, "euclidean", straight)
    assert rep.ok
    speed = math.hypot(0.7, 0.1)
    assert rep.max_lift_speed == pytest.approx(speed, rel=1e-12)
    assert rep.max_curve_speed == pytest.approx(speed, rel=1e-12)


def test_zigzag_lifts_slower_than_curve():
    taus = np.arange(11.0)
    xs = 0.9 * np.array([0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0], dtype=float)
    rep = geodesic_lift_check(None, "euclidean", CurvePath(taus, np.column_stack([taus, xs]), "conformal"))
    assert rep.ok and rep.max_lift_speed <= 0.9 + 1e-15


def test_lift_rejects_spacelike_input():
    taus = np.array([0.0, 1.0])
    with pytest.raises(CausalityError):
        geodesic_lift_check(None, "euclidean", CurvePath(taus, [[0.0, 0.0], [1.0, 1.5]], "conformal"))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_lift_length_saturates_bound(seed):
    curve = random_timelike_polyline(np.random.default_rng(seed), 8, 3)
    for j in range(1, curve.params.size):
        chord = float(np.linalg.norm(curve.points[j, 1:] - curve.points[0, 1:]))
        bound = distance_lower_bound(curve.params[0], curve.params[j], chord).bound
        assert lorentzian_length(None, "euclidean", lift_path(curve, j)) == pytest.approx(bound, abs=1e-9)


def test_physical_lift_length_scales_with_a():
    # constant a = 2: physical length is twice the conformal one
    taus = np.linspace(0.0, 1.0, 5)
    curve = CurvePath(taus, np.column_stack([taus, 0.6 * taus]), "conformal")
    rep = geodesic_lift_check(sf("2 + 0*t"), "euclidean", curve)
    assert rep.physical_final_length == pytest.approx(2 * 0.8, rel=1e-10)
