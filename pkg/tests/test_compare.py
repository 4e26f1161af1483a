from __future__ import annotations

import math
from itertools import pairwise

import pytest

from collarbound.compare import (
    check_collar_volume,
    check_contraction,
    check_flow_time,
    detect_rigidity,
    model_distance,
    validate,
)
from collarbound.errors import DepthOutOfRange, ParameterError, UnsupportedOperation
from collarbound.reports import Verdict, count_verdicts, judge
from collarbound.spaces import SphericalCap, make_cone, make_warped_collar

SMALL = {"samples": 200_000, "pairs": 200, "points": 40, "base_angle_points": 4}


def _verdicts(reports):
    return {(r.claim, tuple(sorted(r.parameters.items()))): r.verdict for r in reports}


def test_judge_rules():
    assert judge(1.0, 1.0) is Verdict.PASS_AT_EQUALITY
    assert judge(0.5, 1.0) is Verdict.PASS
    assert judge(1.5, 1.0) is Verdict.FAIL
    assert judge(1.5, 1.0, control=True) is Verdict.CONTROL
    assert judge(1.5, 1.0, sense="ge") is Verdict.PASS
    assert judge(float("nan"), 1.0) is Verdict.FAIL


@pytest.mark.parametrize("name", ["ball", "hemisphere"])
def test_equality_models_pass_at_equality(request, name):
    space = request.getfixturevalue(name)
    reports, skipped = validate(space, params=SMALL, seed=1)
    assert not skipped
    assert {r.verdict for r in reports} == {Verdict.PASS_AT_EQUALITY}


def test_cones_and_collars_pass_at_equality():
    spaces = [
        make_cone({"type": "round_sphere", "dimension": 2, "radius": 1.0}, "linear", 1.0),
        make_cone({"type": "round_sphere", "dimension": 1, "radius": 1.0}, "spherical", math.pi / 2),
        make_warped_collar(4 * math.pi, 0, 1.0, 3),
        make_warped_collar(2 * math.pi, 1, math.pi / 2, 2),
    ]
    for space in spaces:
        reports, _ = validate(space, params=SMALL, seed=2)
        assert reports
        assert {r.verdict for r in reports} == {Verdict.PASS_AT_EQUALITY}, space.describe()


@pytest.mark.parametrize("space_factory", [
    lambda: SphericalCap(2, 1.2),
    lambda: __import__("collarbound.spaces", fromlist=["Ellipsoid"]).Ellipsoid([0.8, 0.75, 0.75]),
])
def test_strict_spaces_pass(space_factory):
    space = space_factory()
    reports, _ = validate(space, params=SMALL, seed=3)
    for rep in reports:
        if rep.claim == "flow_time":
            # Footpoint curves always realize the model time; the minimum is an equality.
            assert rep.verdict is Verdict.PASS_AT_EQUALITY
        elif rep.claim == "rigidity":
            # Verdict-only report: pass means the fingerprint finds no warped product.
            assert rep.verdict is Verdict.PASS and not rep.details["rigid"]
        else:
            assert rep.verdict is Verdict.PASS, rep.summary()
            assert rep.margin > rep.slack


def test_square_fingerprint(square):
    reports, _ = validate(square, params=SMALL, seed=4)
    controls = {r.claim for r in reports if r.verdict is Verdict.CONTROL}
    equal = {r.claim for r in reports if r.verdict is Verdict.PASS_AT_EQUALITY}
    assert controls == {"contraction", "boundary_convexity", "hessian_comparison", "rigidity"}
    assert equal == {"collar_volume", "cone_volume", "inradius", "flow_time", "level_area"}
    assert count_verdicts(reports)[Verdict.FAIL.value] == 0


def test_square_same_edge_ratio_is_one(square):
    rep = check_contraction(square, 0.3, 500, seed=5)
    assert rep.measured == pytest.approx(1.0, abs=1e-6)
    assert rep.verdict is Verdict.CONTROL


def test_uncertified_ellipsoid_controls(ellipsoid):
    rep = check_contraction(ellipsoid, 0.3, 300, seed=6)
    assert rep.verdict in (Verdict.PASS, Verdict.CONTROL)
    assert rep.control


def test_ellipsoid_collar_margin_monotone(ellipsoid):
    margins = [check_collar_volume(ellipsoid, r, 400_000, seed=7).margin for r in (0.1, 0.2, 0.3, 0.4)]
    assert all(b >= a for a, b in pairwise(margins))


def test_collar_depth_out_of_range(ball):
    with pytest.raises(DepthOutOfRange):
        check_collar_volume(ball, 1.5)
    with pytest.raises(DepthOutOfRange):
        check_collar_volume(ball, 0.0)


def test_flow_time_zero_level(ball):
    rep = check_flow_time(ball, 0.0, 10)
    assert rep.measured == 0.0 and rep.passed


def test_rigidity_detection(ball, ellipsoid):
    assert detect_rigidity(ball, 0.6, 100, samples=200_000).details["rigid"]
    rep = detect_rigidity(ellipsoid, 0.3, 100, samples=200_000)
    assert not rep.details["rigid"]
    assert rep.measured >= 1e-2


def test_model_distance_spherical_limits():
    assert model_distance(1, 0.0, 0.7) == pytest.approx(0.7)
    assert model_distance(1, math.pi / 2, 0.7) == pytest.approx(0.0, abs=1e-7)
    assert model_distance(0, 0.25, 2.0) == 1.5


def test_validate_is_deterministic(hemisphere):
    a, _ = validate(hemisphere, params=SMALL, seed=8)
    b, _ = validate(hemisphere, params=SMALL, seed=8)
    strip = lambda reps: [{**r.as_row(), "runtime": 0} for r in reps]
    assert strip(a) == strip(b)


def test_validate_rejects_bad_claims(ball):
    with pytest.raises(ParameterError):
        validate(ball, ["volume_of_everything"])
    collar = make_warped_collar(4 * math.pi, 0, 1.0, 3)
    with pytest.raises(UnsupportedOperation):
        validate(collar, ["contraction"])
    _, skipped = validate(collar, params=SMALL)
    assert "contraction" in skipped
