"""Acceptance suite: one test per criterion, each logging a single pass/fail line.

The lines are repeated in the pytest terminal summary under "acceptance
criteria". Tolerances and time limits are the stated ones; nothing is relaxed.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest
from conftest import record_acceptance

from collarbound import cli
from collarbound.compare import contraction_ratios, detect_rigidity, measured_inradius
from collarbound.convexity import base_angle, level_base_angles
from collarbound.flow import flow_time, flow_times, kappa0_profile
from collarbound.measure import boundary_area, rough_volume, volume
from collarbound.spaces import (
    Ellipsoid,
    EuclideanBall,
    SphericalCap,
    SquareControl,
    make_cone,
    sample_boundary,
)

BUNDLED = ["ball_equality", "hemisphere_equality", "square_control", "ellipsoid_strict",
           "certified_ellipsoid", "packing_trend"]


@pytest.fixture(scope="module")
def ball():
    return EuclideanBall(3)


@pytest.fixture(scope="module")
def hemisphere():
    return SphericalCap(2, math.pi / 2)


@pytest.fixture(scope="module")
def square():
    return SquareControl(2)


@pytest.fixture(scope="module")
def ellipsoid():
    # Semi-axes (1, 0.9, 0.9): smallest principal curvature 0.9, kept under audit "report".
    return Ellipsoid([1.0, 0.9, 0.9], audit="report")


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def test_criterion_01_collar_equality_flat(ball):
    ok, parts = True, []
    for r in (0.25, 0.5, 0.75, 1.0):
        est, dt = _timed(lambda r=r: volume(ball, "collar", 10**6, seed=101, r=r, method="monte_carlo"))
        exact = 4 * math.pi * ((1 - (1 - r) ** 3) / 3)
        good = (abs(est.value - exact) <= 3 * est.std_error
                and est.std_error <= 0.005 * exact and dt <= 30)
        ok &= good
        parts.append(f"r={r}: {est.value:.5f} vs {exact:.5f} "
                     f"({abs(est.value - exact) / est.std_error:.2f} sigma, "
                     f"sigma {100 * est.std_error / exact:.2f}%, {dt:.1f}s)")
    assert record_acceptance(1, "collar volume equality, unit 3-ball", ok, "; ".join(parts))


def test_criterion_02_collar_equality_spherical(hemisphere):
    ok, parts = True, []
    for r in (math.pi / 8, math.pi / 4, math.pi / 2):
        est, dt = _timed(lambda r=r: volume(hemisphere, "collar", 10**6, seed=102, r=r,
                                        method="monte_carlo"))
        exact = 2 * math.pi * math.sin(r)
        good = abs(est.value - exact) <= 3 * est.std_error and dt <= 30
        ok &= good
        parts.append(f"r={r:.4f}: {est.value:.5f} vs {exact:.5f} "
                     f"({abs(est.value - exact) / est.std_error:.2f} sigma, {dt:.1f}s)")
    assert record_acceptance(2, "collar volume equality, hemisphere", ok, "; ".join(parts))


def test_criterion_03_strict_inequality(ellipsoid):
    def run():
        est = volume(ellipsoid, "collar", 10**6, seed=103, r=0.3, method="monte_carlo")
        A0 = boundary_area(ellipsoid)
        return est, A0.value * (1 - 0.7**3) / 3
    (est, bound), dt = _timed(run)
    margin = bound - est.value
    ok = margin >= 3 * est.std_error and dt <= 60
    assert record_acceptance(3, "strict collar inequality, ellipsoid (1, 0.9, 0.9), r = 0.3", ok,
                             f"bound {bound:.5f} - measured {est.value:.5f} = {margin:.5f} "
                             f">= 3 sigma = {3 * est.std_error:.5f} ({dt:.1f}s)")


def _edge_id(X):
    axis = np.argmax(np.abs(X), axis=1)
    return 2 * axis + (X[np.arange(len(X)), axis] > 0)


def _same_edge(P, i, j):
    return _edge_id(P[i]) == _edge_id(P[j])


def test_criterion_04_contraction(ball, hemisphere, square):
    start = time.perf_counter()
    _, rb, _ = contraction_ratios(ball, 0.3, 1000, seed=104)
    _, rh, _ = contraction_ratios(hemisphere, math.pi / 3, 1000, seed=104)
    _, rs, (P, i, j) = contraction_ratios(square, 0.3, 1000, seed=104)
    same = _same_edge(P, i, j)
    dt = time.perf_counter() - start
    ok = (len(rb) >= 1000 and abs(rb.max() - 0.7) <= 1e-3
          and len(rh) >= 1000 and abs(rh.max() - 0.5) <= 1e-3
          and same.sum() > 0 and abs(rs[same].max() - 1.0) <= 1e-6 and dt <= 60)
    assert record_acceptance(4, "flow contraction", ok,
                             f"ball max {rb.max():.6f} over {len(rb)} pairs; hemisphere max "
                             f"{rh.max():.6f} over {len(rh)}; square same-edge max {rs[same].max():.9f} "
                             f"over {int(same.sum())} pairs (expected control failure); {dt:.1f}s")


def test_criterion_05_flow_time(ball, ellipsoid):
    start = time.perf_counter()
    t_ball = flow_time(ball, kappa0_profile(), [1.0, 0.0, 0.0], 0.5, step=1e-3)
    # The normal of the (1, 0.9, 0.9) ellipsoid meets the medial segment at depth
    # s* in [0.81, 0.9]; T = 0.85 separates crossing from non-crossing samples.
    T = 0.85
    P = sample_boundary(ellipsoid, 200, seed=105)
    times, _ = flow_times(ellipsoid, kappa0_profile(), P, T, step=1e-3)
    n = P / np.array([1.0, 0.81, 0.81])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    s_star = np.hypot(P[:, 1], P[:, 2]) / np.hypot(n[:, 1], n[:, 2])
    crosses = s_star < T
    excess = times[crosses] - times.min()
    dt = time.perf_counter() - start
    ok = (abs(t_ball - math.log(2)) <= 1e-4 and crosses.any() and (excess > 1e-3).all()
          and dt <= 30)
    assert record_acceptance(5, "flow time", ok,
                             f"ball |t - ln 2| = {abs(t_ball - math.log(2)):.2e}; ellipsoid "
                             f"T={T}: {int(crosses.sum())} crossing samples, min excess "
                             f"{excess.min():.4f} > 1e-3; {dt:.1f}s")


def test_criterion_06_hessian_comparison(ball, hemisphere, square):
    start = time.perf_counter()
    ok, parts = True, []
    for space, levels, bound in ((ball, (0.25, 0.5, 0.75), lambda t: 1 / (1 - t)),
                                 (hemisphere, (math.pi / 8, math.pi / 4, math.pi / 3), math.tan)):
        for t in levels:
            est = level_base_angles(space, t, 8, seed=106)
            worst = max(abs(e.estimate - bound(t)) / bound(t) for e in est)
            ok &= worst <= 0.05
            parts.append(f"{space.kind.value} t={t:.4f}: max rel dev {worst:.2e}")
    edge = base_angle(square, [0.0, -1.0]).estimate
    dt = time.perf_counter() - start
    ok &= edge <= 0.01 and dt <= 60
    parts.append(f"square edge {edge:.3g}; {dt:.1f}s")
    assert record_acceptance(6, "Hessian comparison", ok, "; ".join(parts))


def test_criterion_07_inradius(ball, hemisphere, ellipsoid):
    start = time.perf_counter()
    vals = [measured_inradius(s, seed=107)[0] for s in (ball, hemisphere, ellipsoid)]
    dt = time.perf_counter() - start
    targets = (1.0, math.pi / 2, 0.9)
    ok = all(abs(v - t) <= 1e-3 for v, t in zip(vals, targets)) and dt <= 10
    assert record_acceptance(7, "inradius", ok,
                             f"ball {vals[0]:.6f}, hemisphere {vals[1]:.6f}, ellipsoid {vals[2]:.6f}; "
                             f"{dt:.1f}s")


def test_criterion_08_cone_closed_forms():
    lin = make_cone({"type": "round_sphere", "dimension": 2, "radius": 1.0}, "linear", 1.0)
    sph = make_cone({"type": "round_sphere", "dimension": 1, "radius": 1.0}, "spherical", math.pi / 2)
    (v1, v2), dt = _timed(lambda: (volume(lin, method="analytic"), volume(sph, method="analytic")))
    e1, e2 = abs(v1.value - 4 * math.pi / 3), abs(v2.value - 2 * math.pi)
    ok = e1 <= 1e-12 and e2 <= 1e-12 and dt < 1.0
    assert record_acceptance(8, "cone closed forms", ok,
                             f"linear cone error {e1:.1e}, spherical cone error {e2:.1e}; {dt * 1e3:.2f} ms")


def test_criterion_09_packing_ratio():
    def run():
        big = rough_volume(EuclideanBall(2, 1.0), [0.2, 0.1, 0.05], seed=109)
        small = rough_volume(EuclideanBall(2, 0.5), [0.2, 0.1, 0.05], seed=109)
        return big, small
    (big, small), dt = _timed(run)
    ratio = big[-1].scaled / small[-1].scaled
    ok = abs(ratio - 4) <= 0.15 * 4 and dt <= 120
    assert record_acceptance(9, "packing rough volume", ok,
                             f"eps^2 beta at eps=0.05: {big[-1].scaled:.4f} / {small[-1].scaled:.4f} "
                             f"= {ratio:.3f} (4 +/- 15%); {dt:.1f}s")


def test_criterion_10_rigidity(ball, ellipsoid):
    start = time.perf_counter()
    rb = detect_rigidity(ball, 0.6, seed=110)
    re_ = detect_rigidity(ellipsoid, 0.3, seed=110)
    dt = time.perf_counter() - start
    ok = (rb.measured <= 1e-3 and rb.details["rigid"]
          and re_.measured >= 1e-2 and not re_.details["rigid"] and dt <= 120)
    assert record_acceptance(10, "rigidity fingerprint", ok,
                             f"ball r=0.6 residual {rb.measured:.2e} (rigid={rb.details['rigid']}); "
                             f"ellipsoid r=0.3 residual {re_.measured:.3f} "
                             f"(rigid={re_.details['rigid']}); {dt:.1f}s")


def test_criterion_11_determinism(tmp_path):
    quiet = lambda *a, **k: None
    mismatched = []
    for name in BUNDLED:
        _, a = cli.run_scenario(name, tmp_path / "first" / name, echo=quiet)
        _, b = cli.run_scenario(name, tmp_path / "second" / name, echo=quiet)
        files = sorted(p.name for p in a.iterdir() if p.name != "timings.tsv")
        for f in files:
            if (a / f).read_bytes() != (b / f).read_bytes():
                mismatched.append(f"{name}/{f}")
    ok = not mismatched
    assert record_acceptance(11, "determinism of bundled scenarios", ok,
                             f"{len(BUNDLED)} scenarios run twice; "
                             + ("all results files bit-identical" if ok else f"differ: {mismatched}"))
