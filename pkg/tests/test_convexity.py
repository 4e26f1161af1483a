from __future__ import annotations

import math
from itertools import pairwise

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from collarbound.convexity import (
    base_angle,
    boundary_convexity_check,
    chord_expansion_selftest,
    comparison_bound,
    concavity_modulus,
    hessian_comparison_check,
    level_base_angles,
)
from collarbound.errors import DomainError, ParameterError, UnsupportedOperation
from collarbound.reports import Verdict
from collarbound.spaces import EuclideanBall, make_warped_collar, sample_boundary


def test_disk_boundary_base_angle(disk):
    est = base_angle(disk, [0.0, -1.0])
    assert est.estimate == pytest.approx(1.0, rel=0.05)


def test_square_edge_base_angle(square):
    assert base_angle(square, [0.0, -1.0]).estimate <= 0.01


def test_ball_level_base_angle(ball):
    x = np.array([0.5, 0.0, 0.0])
    assert base_angle(ball, x, level=0.5).estimate == pytest.approx(2.0, rel=0.05)


@pytest.mark.parametrize("t", [math.pi / 8, math.pi / 4, math.pi / 3])
def test_hemisphere_latitude_base_angle(hemisphere, t):
    x = np.array([math.cos(t), 0.0, math.sin(t)])
    assert base_angle(hemisphere, x, level=t).estimate == pytest.approx(math.tan(t), rel=0.05)


@given(st.floats(0.5, 3.0), st.integers(0, 1000))
def test_base_angle_scale_covariance(c, seed):
    # A disk of radius c has boundary curvature 1/c.
    disk = EuclideanBall(2, c)
    p = sample_boundary(disk, 1, seed)[0]
    radii = tuple(c * r for r in (0.08, 0.04, 0.02, 0.01, 0.005))
    est = base_angle(disk, p, r_schedule=radii, seed=seed).estimate
    unit = base_angle(EuclideanBall(2), p / c, seed=seed).estimate
    assert est == pytest.approx(unit / c, rel=1e-6)


def test_base_angle_monotone_along_levels(ball):
    levels = [0.0, 0.2, 0.4, 0.6, 0.8]
    est = [min(e.estimate for e in level_base_angles(ball, t, 6, seed=3)) for t in levels]
    assert all(b >= a - 0.01 for a, b in pairwise(est))


def test_certified_body_boundary_base_angle(certified):
    est = level_base_angles(certified, 0.0, 100, seed=4, directions=8)
    assert min(e.estimate for e in est) >= 1 - 0.05


def test_hessian_comparison_ball(ball):
    reps = hessian_comparison_check(ball, [0.25, 0.5, 0.75], points=4, seed=5)
    assert [r.verdict for r in reps] == [Verdict.PASS_AT_EQUALITY] * 3
    for rep, t in zip(reps, (0.25, 0.5, 0.75)):
        assert rep.bound == pytest.approx(1 / (1 - t))


def test_hessian_comparison_near_zero_hemisphere(hemisphere):
    rep = hessian_comparison_check(hemisphere, [1e-3], points=4, seed=6)[0]
    assert rep.passed


def test_boundary_convexity_square_is_control(square):
    rep = boundary_convexity_check(square, points=8, seed=7)
    assert rep.verdict is Verdict.CONTROL


def test_base_angle_requires_chord_geometry():
    collar = make_warped_collar(4 * math.pi, 0, 1.0, 3)
    with pytest.raises(UnsupportedOperation):
        base_angle(collar, [0.0, 0.0, 0.0])


def test_base_angle_point_must_lie_on_level(ball):
    with pytest.raises(ParameterError):
        base_angle(ball, [0.5, 0, 0], level=0.2)
    with pytest.raises(ParameterError):
        base_angle(ball, [1, 0, 0], r_schedule=(0.01, 0.02))


def test_concavity_modulus_examples():
    assert concavity_modulus("kappa0", 0.0) == -1.0
    assert concavity_modulus("kappa1", math.pi / 4) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        concavity_modulus("kappa0", 1.0)
    with pytest.raises(DomainError):
        comparison_bound(1, math.pi / 2)


@pytest.mark.parametrize("M,expected", [(-1.0, 0.5), (-2.0, 1.0)])
def test_chord_expansion(M, expected):
    rep = chord_expansion_selftest(M)
    assert rep.passed
    assert rep.ratio[-1] == pytest.approx(expected, rel=0.05)
    assert rep.taylor_ratio[-1] == pytest.approx(expected, rel=0.05)


def test_chord_expansion_flat():
    rep = chord_expansion_selftest(0.0)
    assert rep.passed and rep.ratio[-1] == 0.0
    with pytest.raises(ParameterError):
        chord_expansion_selftest(1.0)
