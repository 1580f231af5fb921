from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flrwext.errors import DomainError, HypothesisViolation, RegionError
from flrwext.extensions import (
    BOUNDARY,
    ORIGINAL,
    PAST,
    boundary_slice_length,
    build_2d_null_extension,
    build_milne_extension,
    closed_form_factor,
    invert_milne,
    known_gauge,
    metric_determinants,
    milne_grid,
    verify_isometry,
)
from flrwext.scale_factor import parse_scale_factor as sf


@pytest.fixture(scope="module")
def milne():
    return build_milne_extension(sf("t"))


def test_null_chart_forward_and_inverse():
    chart = build_2d_null_extension(sf("t"))
    tt, xt = chart.forward((2.0, 0.5))
    assert tt == pytest.approx(2.0, rel=1e-14)  # t^2/2
    assert xt == pytest.approx(0.5 - math.log(2.0), rel=1e-14)
    assert chart.inverse((2.0, 0.0))[0] == pytest.approx(2.0, rel=1e-14)
    assert chart.region((0.0, 1.0)) == BOUNDARY
    assert chart.region((-1.0, 1.0)) == PAST
    with pytest.raises(RegionError) as info:
        chart.inverse((-1.0, 0.0))
    assert info.value.region == PAST


def test_null_chart_past_extension():
    chart = build_2d_null_extension(sf("t"))
    assert chart.time_of(-2.0) == pytest.approx(-2.0, rel=1e-14)
    assert chart.metric((-2.0, 0.0))[1, 1] == pytest.approx(4.0, rel=1e-13)
    custom = build_2d_null_extension(sf("t", past_source="-2*t"))
    # int_t^0 -2s ds = t^2, so t~ = -t^2
    assert custom.time_of(-4.0) == pytest.approx(-2.0, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_null_chart_round_trip(seed):
    rng = np.random.default_rng(seed)
    chart = build_2d_null_extension(sf("tanh(t)"))
    t, x = rng.uniform(0.01, 5.0), rng.uniform(-3.0, 3.0)
    back = chart.inverse(chart.forward((t, x)))
    assert back == pytest.approx([t, x], rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("src", ["t", "sqrt(t)", "tanh(t)", "t + t^2"])
def test_null_chart_determinant(src):
    chart = build_2d_null_extension(sf(src))
    rng = np.random.default_rng(3)
    pts = [(float(a), float(b)) for a, b in zip(rng.uniform(-2, 2, 200), rng.uniform(-2, 2, 200))]
    pts += [(0.0, 0.0), (0.0, 1.0)]
    assert np.abs(metric_determinants(chart, pts) + 1.0).max() <= 1e-12


def test_null_chart_curvature_blows_up():
    chart = build_2d_null_extension(sf("sqrt(t)"))
    for tt in (1e-2, 1e-4, 1e-6):
        t = chart.time_of(tt)
        assert chart.scalar_curvature(tt) == pytest.approx(-0.5 / t**2, rel=1e-10)


def test_milne_chart_examples(milne):
    assert milne.forward((1.0, 1.0))[:2] == pytest.approx([math.cosh(1.0), math.sinh(1.0)], rel=1e-14)
    assert invert_milne(milne, math.cosh(1.0), math.sinh(1.0)) == pytest.approx((1.0, 1.0), rel=1e-12)
    assert invert_milne(milne, 2.0, 0.0) == pytest.approx((2.0, 0.0), rel=1e-13)
    with pytest.raises(RegionError) as info:
        invert_milne(milne, 1.0, 1.0)
    assert info.value.region == BOUNDARY


def test_milne_round_trip_1000(milne):
    rng = np.random.default_rng(11)
    for t, r in zip(rng.uniform(0.01, 5.0, 1000), rng.uniform(0.0, 3.0, 1000)):
        T, R = milne.forward((t, r))[:2]
        assert milne.region((T, R)) == ORIGINAL
        assert invert_milne(milne, T, R) == pytest.approx((t, r), rel=1e-9, abs=1e-9)


def test_milne_rejects_non_milne():
    for src in ("sqrt(t)", "2*t"):
        with pytest.raises(HypothesisViolation):
            build_milne_extension(sf(src))


@pytest.mark.parametrize("src", ["tanh(t)", "t + t^2"])
def test_closed_form_factors(src):
    chart = build_milne_extension(sf(src), known_gauge(src))
    for T, R in milne_grid(15, 15):
        want = closed_form_factor(src, T, R)
        assert chart.conformal_factor((T, R)) == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("src", ["t", "tanh(t)", "t + t^2"])
def test_factor_continuous_at_light_cone(src):
    chart = build_milne_extension(sf(src), known_gauge(src) or 1.0)
    past = chart.conformal_factor((0.3, 0.5))
    assert past == chart.conformal_factor((0.5, 0.5))
    lim = chart.boundary_limit(R=0.5)
    assert lim.conclusive and abs(lim.value - past) < 1e-6


@pytest.mark.parametrize("src", ["t", "tanh(t)", "t + t^2"])
@pytest.mark.parametrize("differential", ["analytic", "fd"])
def test_milne_isometry(src, differential):
    chart = build_milne_extension(sf(src), d=3)
    grid = [(t, r, 1.0, 0.4) for t in np.linspace(0.1, 3.0, 8) for r in np.linspace(0.0, 2.0, 8)]
    tol = 1e-8 if differential == "analytic" else 1e-6
    assert verify_isometry(chart, grid, differential) < tol


def test_isometry_guard():
    chart = build_2d_null_extension(sf("t"))
    with pytest.raises(DomainError):
        verify_isometry(chart, [(1e-12, 0.0)])


def test_slice_lengths(milne):
    lengths = [boundary_slice_length(milne, n).slice_length for n in (1, 10, 100, 1000)]
    assert lengths == pytest.approx([1.0, 0.1, 0.01, 0.001], rel=1e-10)
    diag = boundary_slice_length(milne, 4, (0.5, 2.0))
    assert diag.ratio_to_a == pytest.approx(1.5, rel=1e-10)
    null = build_2d_null_extension(sf("sqrt(t)"))
    assert boundary_slice_length(null, 10000).slice_length == pytest.approx(0.01, rel=1e-10)
