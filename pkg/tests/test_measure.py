from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import elliprg

from collarbound.errors import ParameterError, PoolTooSmall
from collarbound.measure import (
    MeasureEstimate,
    Method,
    analytic,
    area_profile,
    boundary_area,
    lipschitz_image_bound_check,
    packing_spread,
    rough_volume,
    volume,
)
from collarbound.reports import Verdict
from collarbound.spaces import EuclideanBall, sample_interior


def test_estimate_validation():
    with pytest.raises(ValueError):
        MeasureEstimate(1.0, -1.0, 10, Method.MONTE_CARLO)
    with pytest.raises(ValueError):
        MeasureEstimate(1.0, 0.1, 0, Method.ANALYTIC)
    row = analytic(2.0).as_row("volume")
    assert row["method"] == "Analytic" and row["std_error"] == 0.0


def test_mc_ball_volume(ball):
    est = volume(ball, samples=10**6, seed=1, method="monte_carlo")
    exact = 4 * math.pi / 3
    assert abs(est.value - exact) <= 3 * est.std_error
    # Binomial oracle: cube volume 8, hit probability pi/6.
    p = math.pi / 6
    assert est.std_error == pytest.approx(8 * math.sqrt(p * (1 - p) / 10**6), rel=0.01)


def test_mc_volume_reproducible(ball):
    a = volume(ball, "collar", 200_000, 5, r=0.3, method="monte_carlo")
    b = volume(ball, "collar", 200_000, 5, r=0.3, method="monte_carlo")
    assert a == b


def test_collar_zero_and_analytic(ball, hemisphere):
    assert volume(ball, "collar", r=0.0).value == 0.0
    assert volume(ball, "collar", r=0.5).value == pytest.approx(4 * math.pi / 3 * 7 / 8, abs=1e-12)
    for r in (math.pi / 8, math.pi / 4):
        assert volume(hemisphere, "collar", r=r).value == pytest.approx(2 * math.pi * math.sin(r), abs=1e-12)


def test_collar_beyond_inradius(ball):
    with pytest.raises(ParameterError):
        volume(ball, "collar", r=1.5)


def test_boundary_area_examples(ball, hemisphere):
    assert boundary_area(ball).value == pytest.approx(4 * math.pi, abs=1e-12)
    assert boundary_area(hemisphere).value == pytest.approx(2 * math.pi, abs=1e-12)


@pytest.mark.parametrize("axes", [(1.0, 0.9, 0.9), (0.8, 0.75, 0.75), (1.0, 0.7, 0.5)])
def test_ellipsoid_area_matches_carlson(axes):
    from collarbound.spaces import Ellipsoid

    body = Ellipsoid(list(axes), audit="report", audit_samples=256)
    a, b, c = axes
    # S = 4 pi abc R_G(1/a^2, 1/b^2, 1/c^2).
    exact = 4 * math.pi * a * b * c * elliprg(1 / a**2, 1 / b**2, 1 / c**2)
    est = boundary_area(body)
    assert est.method is Method.MESH
    assert abs(est.value - exact) < 1e-6
    # The reported error is the extrapolation correction, a conservative bound.
    assert abs(est.value - exact) <= est.std_error
    assert abs(boundary_area(body, resolution=256).value - est.value) < 1e-4


def test_ellipse_perimeter_matches_carlson():
    from collarbound.spaces import Ellipsoid

    body = Ellipsoid([1.0, 0.6], audit="report", audit_samples=256)
    a, b = 1.0, 0.6
    # Perimeter = 4 a E(e), E via Carlson: E(m) = 2 R_G(0, 1 - m, 1).
    m = 1 - (b / a) ** 2
    exact = 4 * a * 2 * elliprg(0, 1 - m, 1)
    assert abs(boundary_area(body).value - exact) < 1e-7


def test_area_profile_ball_analytic(ball):
    prof = area_profile(ball, [0.0, 0.3, 0.6])
    np.testing.assert_allclose(prof.area, 4 * math.pi * (1 - prof.t) ** 2, rtol=1e-12)
    np.testing.assert_allclose(prof.reference, prof.area, rtol=1e-12)


def test_area_profile_ball_monte_carlo(ball):
    t = np.linspace(0.0, 0.9, 19)
    prof = area_profile(ball, t, 10**6, seed=3, method="monte_carlo")
    exact = 4 * math.pi * (1 - t) ** 2
    # Finite-difference bias of the second-order scheme is O(h^2) and tiny here.
    assert (np.abs(prof.area - exact) <= 4 * prof.std_error + 2e-3 * exact).all()
    assert (np.diff(prof.volume) >= 0).all()


def test_coarea_consistency(ball):
    t = np.linspace(0.0, 1 - 1 / 64, 64)
    prof = area_profile(ball, t, 10**6, seed=4, method="monte_carlo")
    integral = np.trapezoid(prof.area, prof.t)
    assert integral == pytest.approx(prof.volume[-1], rel=0.01)
    tail = 4 * math.pi * (1 / 64) ** 3 / 3
    assert integral + tail == pytest.approx(4 * math.pi / 3, rel=0.01)


def test_hemisphere_level_area_check(hemisphere):
    A0 = boundary_area(hemisphere)
    A = analytic(hemisphere.level_area_exact(math.pi / 4))
    assert A.value == pytest.approx(math.sqrt(2) * math.pi, abs=1e-12)
    rep = lipschitz_image_bound_check(math.cos(math.pi / 4), A0, A, 1, hemisphere)
    assert rep.verdict is Verdict.PASS_AT_EQUALITY


def test_lipschitz_identity_passes():
    m = MeasureEstimate(3.0, 0.01, 1000, Method.MONTE_CARLO)
    rep = lipschitz_image_bound_check(1.0, m, m, 2)
    assert rep.passed
    with pytest.raises(ParameterError):
        lipschitz_image_bound_check(0.0, m, m, 2)


@pytest.mark.parametrize("eps", [0.125, 0.0625])
def test_interval_packing(eps):
    pool = np.linspace(0.0, 1.0, 1025)
    rows = rough_volume(None, [eps], pool=pool)
    assert rows[0].beta == math.floor(1 / eps) + 1
    assert rows[0].scaled == pytest.approx(eps * (math.floor(1 / eps) + 1))


def test_disk_packing_trend(disk):
    rows = rough_volume(disk, [0.2, 0.1, 0.05], seed=1)
    betas = [r.beta for r in rows]
    assert betas == sorted(betas) and len(set(betas)) == 3
    assert packing_spread(rows) <= 0.15


def test_packing_pool_cap(disk):
    with pytest.raises(PoolTooSmall):
        rough_volume(disk, [0.1, 0.01], pool_cap=10_000)


@given(st.integers(0, 2**32 - 1))
def test_packing_scale_ratio_property(seed):
    # Scaling the pool by 2 and eps by 2 gives the same packing.
    disk = EuclideanBall(2)
    pool = sample_interior(disk, 3000, seed)
    a = rough_volume(None, [0.1], pool=pool)[0].beta
    b = rough_volume(None, [0.2], pool=2 * pool)[0].beta
    assert a == b
