#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hadamardlab.busemann import BusemannFunction
from hadamardlab.dynamics import (
    ELLIPTIC,
    HYPERBOLIC_KIND,
    PARABOLIC,
    CenterResult,
    FiniteBoundarySet,
    JoinFan,
    center_of_finite_set,
    class_center_of_mass,
    classify,
    divergence_monotonicity_check,
    horosphere_invariance_check,
    km_tracking,
    radius_function,
)
from hadamardlab.errors import PreconditionError
from hadamardlab.isometries import boost, parabolic, product_isometry, rotation
from hadamardlab.models import (
    boundary_point,
    euclidean,
    hyperbolic,
    ideal_point,
    join,
    product,
    tits_distance,
)
from hadamardlab.reports import FAIL, PASS

H2 = hyperbolic(2)
H2xH2 = product(H2, H2)
INF = ideal_point(H2)


def test_classify_kinds():
    """
    Boosts are hyperbolic, parabolics parabolic and rotations elliptic.
    """
    c = classify(boost(H2, 1.0))
    assert c.kind == HYPERBOLIC_KIND
    assert c.translation_length == pytest.approx(1.0, rel=1e-6)
    assert classify(parabolic(H2, 1.0)).kind == PARABOLIC
    c, s = math.cos(0.7), math.sin(0.7)
    assert classify(rotation(H2, [[c, -s], [s, c]])).kind == ELLIPTIC


def test_classify_conjugated_parabolic():
    """
    A parabolic conjugated into a full Lorentz matrix stays parabolic with
    zero translation length, at small and large shifts.
    """
    c, s = math.cos(0.7), math.sin(0.7)
    r = rotation(H2, [[c, -s], [s, c]])
    for shift in (1.0, 30.0):
        g = parabolic(H2, shift).conjugate(r)
        res = classify(g)
        assert res.kind == PARABOLIC
        assert res.translation_length == 0.0
        assert g.translation_length() < 1e-6


def test_tracking_pure_axis():
    """
    An orbit on the axis of a boost is tracked exactly.
    """
    g = product_isometry(H2xH2, boost(H2, 1.0), None)
    res = km_tracking(g, H2xH2.origin(), k_max=256)
    assert res.A == pytest.approx(1.0)
    assert res.ratios[-1][1] <= 1e-9
    assert res.report.passed


def test_tracking_mixed():
    """
    Boost times parabolic: the tracking ratio decays along the orbit.
    """
    g = product_isometry(H2xH2, boost(H2, 1.0), parabolic(H2, 1.0))
    res = km_tracking(g, H2xH2.origin(), k_max=1024)
    assert res.ratios[-1][1] < res.ratios[0][1]
    assert res.ratios[-1][1] < 0.05


def test_tracking_rejects_zero_displacement():
    """
    Tracking needs a positive infimum displacement.
    """
    g = product_isometry(H2xH2, parabolic(H2, 1.0), parabolic(H2, 1.0))
    with pytest.raises(PreconditionError):
        km_tracking(g, H2xH2.origin(), k_max=64)


def test_tracking_uses_orbit_estimate():
    """
    The displacement used for tracking agrees with the orbit bracket; a
    conjugated parabolic is rejected although its orbit ratios stay positive.
    """
    c, s = math.cos(0.7), math.sin(0.7)
    r = rotation(H2, [[c, -s], [s, c]])
    g = boost(H2, 1.0).conjugate(r)
    res = km_tracking(g, H2.origin(), k_max=256)
    lower, upper = res.report["A_bracket"]
    assert res.A == pytest.approx(1.0, abs=1e-9)
    assert res.A <= lower + 1e-9
    assert upper >= lower
    verdicts = {(r.audit, r.key): r.verdict for r in res.report.records}
    assert verdicts[("km displacement", "closed<=orbit")] == PASS
    p = parabolic(H2, 30.0).conjugate(r)
    with pytest.raises(PreconditionError, match="orbit bracket"):
        km_tracking(p, H2.origin(), k_max=64)


def test_center_of_join_set():
    """
    The center of joins at several angles sits at the mid angle.
    """
    K = [join(H2xH2, [INF, INF], theta=t) for t in (0.1, 0.5, 1.2)]
    res = center_of_finite_set(K, restarts=3)
    assert res.radius == pytest.approx(0.55, abs=1e-4)
    assert tits_distance(res.point, join(H2xH2, [INF, INF], theta=0.65)) < 1e-4
    single = center_of_finite_set(K[:1])
    assert single.radius == 0.0


def test_center_restarts_agree():
    """
    Every restart minimizer enters the spread, for the scalar search over a
    join angle and for Nelder-Mead over Euclidean directions.
    """
    K = [join(H2xH2, [INF, INF], theta=t) for t in (0.1, 0.5, 1.2)]
    res = center_of_finite_set(K, restarts=10)
    assert res.agree
    assert res.spread <= 1e-4
    E2 = euclidean(2)
    K = [boundary_point(E2, [math.cos(a), math.sin(a)]) for a in (0.0, 0.5, 1.2)]
    res = center_of_finite_set(K, restarts=10)
    assert res.agree
    assert res.spread <= 1e-4
    assert res.radius == pytest.approx(0.6, abs=1e-6)


angle = st.floats(min_value=0.0, max_value=math.pi / 2, allow_nan=False)
chart = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@given(st.lists(angle, min_size=2, max_size=5), chart, chart)
def test_center_matches_grid_oracle(thetas, u1, u2):
    """
    On joins sharing their factor endpoints the center radius matches the
    radius function minimized on a 1e-3 grid of join angles.
    """
    ends = [ideal_point(H2, [u1]), ideal_point(H2, [u2])]
    K = [join(H2xH2, ends, theta=t) for t in thetas]
    res = center_of_finite_set(K, restarts=10)
    grid = np.append(np.arange(0.0, math.pi / 2, 1e-3), math.pi / 2)
    oracle = min(radius_function(K, join(H2xH2, ends, theta=t)) for t in grid)
    assert abs(res.radius - oracle) <= 1e-3
    assert res.radius <= oracle + 1e-9
    assert res.agree


@given(st.floats(min_value=-math.pi, max_value=math.pi), st.floats(min_value=-1.5, max_value=1.5))
def test_class_center_equivariant(a, length):
    """
    Conjugating the generators and moving F_A moves the class center along.
    """
    c, s = math.cos(a), math.sin(a)
    conjugator = product_isometry(
        H2xH2, rotation(H2, [[c, -s], [s, c]]).compose(boost(H2, length)), boost(H2, 0.5)
    )
    gens = [
        product_isometry(H2xH2, parabolic(H2, 1.0), None),
        product_isometry(H2xH2, None, parabolic(H2, 1.0)),
    ]
    fan = JoinFan(H2xH2, [[np.array([1.0, 0.0])], [np.array([1.0, 0.0])]], thetas=9)
    res = class_center_of_mass(gens, fan, restarts=3)
    moved = class_center_of_mass([g.conjugate(conjugator) for g in gens], fan.transform(conjugator), restarts=3)
    assert tits_distance(moved.point, conjugator.apply_boundary(res.point)) < 1e-6
    assert moved.alpha == pytest.approx(res.alpha, abs=1e-6)


def test_center_rejects_wide_set():
    """
    Sets wider than pi/2 have no center of mass.
    """
    E2 = euclidean(2)
    K = [boundary_point(E2, [1.0, 0.0]), boundary_point(E2, [-1.0, 0.1])]
    with pytest.raises(PreconditionError):
        center_of_finite_set(K)
    with pytest.raises(ValueError):
        center_of_finite_set([])


def test_class_center_product_z2():
    """
    The parabolic Z^2 of H^2 x H^2 has its class center at the diagonal join.
    """
    gens = [
        product_isometry(H2xH2, parabolic(H2, 1.0), None),
        product_isometry(H2xH2, None, parabolic(H2, 1.0)),
    ]
    fan = JoinFan(H2xH2, [[np.array([1.0, 0.0])], [np.array([1.0, 0.0])]])
    res = class_center_of_mass(gens, fan, restarts=3)
    assert res.report.passed
    assert tits_distance(res.point, join(H2xH2, [INF, INF], theta=math.pi / 4)) < 1e-4
    assert res.alpha == pytest.approx(math.pi / 4, abs=1e-4)


def test_class_center_alpha_must_be_positive(monkeypatch):
    """
    A center at Tits distance pi/2 or more from B leaves no room for alpha
    and fails the certificate.
    """
    import hadamardlab.dynamics as dynamics

    far = join(H2xH2, [ideal_point(H2, [0.0]), INF], theta=0.0)

    def far_center(B, restarts=10, seed=0):
        return CenterResult(far, max(tits_distance(far, y) for y in B), True, 0.0)

    monkeypatch.setattr(dynamics, "center_of_finite_set", far_center)
    gens = [
        product_isometry(H2xH2, parabolic(H2, 1.0), None),
        product_isometry(H2xH2, None, parabolic(H2, 1.0)),
    ]
    fan = JoinFan(H2xH2, [[np.array([1.0, 0.0])], [np.array([1.0, 0.0])]])
    res = class_center_of_mass(gens, fan)
    assert res.alpha <= 0.0
    verdicts = {r.audit: r.verdict for r in res.report.records}
    assert verdicts["class center alpha"] == FAIL
    assert verdicts["class center B"] == PASS
    assert not res.report.passed


def test_class_center_needs_fixed_points():
    """
    A boundary set with no fixed samples leaves B empty.
    """
    with pytest.warns(Warning):
        with pytest.raises(PreconditionError):
            class_center_of_mass([parabolic(H2, 1.0)], FiniteBoundarySet([ideal_point(H2, [0.0])]))


def test_horosphere_invariance():
    """
    Parabolics preserve horospheres at their fixed point; boosts shift them by |g|.
    """
    h = BusemannFunction(INF, H2.origin())
    rep = horosphere_invariance_check(parabolic(H2, 1.0), h, samples=50)
    assert rep["invariant"]
    rep = horosphere_invariance_check(boost(H2, 1.0), h, samples=50)
    assert not rep["invariant"]
    assert rep["drift"] == pytest.approx(1.0)
    assert rep.passed


def test_divergence_along_vertical_ray():
    """
    Along the ray to the fixed point the Busemann function drops at unit rate
    and the parabolic displacement shrinks.
    """
    h = BusemannFunction(INF, H2.origin())
    rep = divergence_monotonicity_check(parabolic(H2, 1.0), h, INF)
    assert rep.verdict == PASS
    assert rep["alpha"] == pytest.approx(math.pi / 2)


if __name__ == "__main__":
    test_classify_kinds()
    test_classify_conjugated_parabolic()
    test_tracking_pure_axis()
    test_tracking_uses_orbit_estimate()
    test_class_center_product_z2()
    test_center_restarts_agree()
