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

from hadamardlab.busemann import BusemannFunction, ConvexCombination
from hadamardlab.convex import (
    HoroballIntersection,
    check_obtuse_comparison,
    contraction_audit,
    minimize_on_sphere,
    monotone_levels_audit,
    project_to_horoball,
    project_to_intersection,
    sublevel_flow,
)
from hadamardlab.errors import InfeasibleError
from hadamardlab.models import (
    ModelPoint,
    TangentVector,
    boundary_point,
    distance,
    euclidean,
    exp_map,
    geodesic_ray,
    hyperbolic,
    ideal_point,
    join,
    product,
    tits_distance,
)
from hadamardlab.reports import INAPPLICABLE, PASS

E2 = euclidean(2)
E3 = euclidean(3)
H2 = hyperbolic(2)


def _quadrant():
    """x1 >= 1 and x2 >= 1 as two Euclidean horoballs."""
    o = E2.origin()
    hs = [BusemannFunction(boundary_point(E2, d), o) for d in ([1.0, 0.0], [0.0, 1.0])]
    return HoroballIntersection(hs, [-1.0, -1.0])


def test_flat_sphere_minimizer():
    """
    In flat space the sphere minimizer lies on the weighted mean direction.
    """
    o = E3.origin()
    hs = [BusemannFunction(boundary_point(E3, np.eye(3)[i]), o) for i in range(2)]
    f = ConvexCombination.of(hs, [0.5, 0.5])
    res = minimize_on_sphere(f, o, 10.0)
    expected = 10.0 * np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    assert np.allclose(res.point.coords, expected, atol=1e-7)
    assert res.residual <= 1e-8


def test_hyperbolic_sphere_minimizer():
    """
    The Busemann function of infinity is minimized at the top of the sphere.
    """
    o = H2.origin()
    f = ConvexCombination.of([BusemannFunction(ideal_point(H2), o)], [1.0])
    res = minimize_on_sphere(f, o, 4.0)
    assert np.allclose(res.point.coords, [0.0, 4.0], atol=1e-7)
    with pytest.raises(ValueError):
        minimize_on_sphere(f, o, 0.0)


def test_product_sphere_minimizer_symmetry():
    """
    Swap-symmetric joins put the midpoint minimizer on the diagonal; a single
    vertex is minimized along its ray.
    """
    h2 = hyperbolic(2)
    space = product(h2, h2)
    o = space.origin()
    inf = ideal_point(h2)
    hs = [BusemannFunction(join(space, [inf, inf], theta=th), o) for th in (math.pi / 8, 3 * math.pi / 8)]
    p = minimize_on_sphere(ConvexCombination.of(hs, [0.5, 0.5]), o, 6.0).point
    assert p.coords[0] == pytest.approx(p.coords[2], abs=1e-7)
    assert p.coords[1] == pytest.approx(p.coords[3], abs=1e-7)
    q = minimize_on_sphere(ConvexCombination.of(hs, [1.0, 0.0]), o, 6.0).point
    assert distance(q, geodesic_ray(o, hs[0].center, 6.0)) < 1e-7


def test_sphere_minimizer_beats_sampling():
    """
    No sampled sphere point has a smaller value than the certified minimizer.
    """
    h2 = hyperbolic(2)
    space = product(h2, h2)
    o = space.origin()
    hs = [
        BusemannFunction(join(space, [ideal_point(h2), ideal_point(h2, [0.4])], theta=0.5), o),
        BusemannFunction(join(space, [ideal_point(h2), ideal_point(h2, [0.4])], theta=1.1), o),
    ]
    f = ConvexCombination.of(hs, [0.3, 0.7])
    best = f(minimize_on_sphere(f, o, 3.0).point)
    rng = np.random.default_rng(5)
    for v in rng.normal(size=(2000, 4)):
        x = exp_map(TangentVector(o, 3.0 * v / np.linalg.norm(v)))
        assert f(x) >= best - 1e-7


def test_project_to_horoball():
    """
    Projection slides along the ray toward the center and fixes feasible points.
    """
    o = H2.origin()
    h = BusemannFunction(ideal_point(H2), o)
    p = project_to_horoball(h, -1.0, o)
    assert np.allclose(p.coords, [0.0, 1.0])
    inside = ModelPoint(H2, [0.3, 2.0])
    assert project_to_horoball(h, -1.0, inside) is inside


def test_project_to_intersection_kkt():
    """
    The closest point of the quadrant is its corner, certified by both constraints.
    """
    C = _quadrant()
    res = project_to_intersection(C, E2.origin())
    assert np.allclose(res.point.coords, [1.0, 1.0], atol=1e-7)
    assert res.residual <= 1e-7
    assert set(res.active) == {0, 1}
    assert all(lam >= 0.0 for lam in res.multipliers)
    feasible = ModelPoint(E2, [2.0, 3.0])
    assert project_to_intersection(C, feasible).point is feasible


def test_empty_intersection():
    """
    Opposite half-planes with disjoint levels are reported infeasible.
    """
    o = E2.origin()
    hs = [BusemannFunction(boundary_point(E2, d), o) for d in ([1.0, 0.0], [-1.0, 0.0])]
    C = HoroballIntersection(hs, [-1.0, 0.0])
    with pytest.raises(InfeasibleError):
        project_to_intersection(C, o)


def test_obtuse_comparison():
    """
    The projected angle is obtuse and the comparison inequality holds.
    """
    C = _quadrant()
    rep = check_obtuse_comparison(C, E2.origin(), ModelPoint(E2, [2.0, 3.0]))
    assert rep.verdict == PASS
    assert rep["angle"] >= math.pi / 2
    assert rep["lhs"] == pytest.approx(math.sqrt(5.0))
    assert rep["rhs"] == pytest.approx(math.sqrt(11.0))
    rep = check_obtuse_comparison(C, E2.origin(), ModelPoint(E2, [0.0, 3.0]))
    assert rep.verdict == INAPPLICABLE


def test_monotone_levels():
    """
    Lowering levels moves the projection by at most the l1 level change.
    """
    C = _quadrant()
    rep = monotone_levels_audit(C, [-1.0, -1.0], [-2.0, -1.5], E2.origin())
    assert rep.verdict == PASS
    assert rep.records[0].measured == pytest.approx(math.sqrt(1.25), abs=1e-7)
    rep = monotone_levels_audit(C, [-1.0, -1.0], [0.0, -1.5], E2.origin())
    assert rep.verdict == INAPPLICABLE


def test_contraction_in_hyperbolic_plane():
    """
    Projection to two tangent-direction horoballs of H^2 is 1-Lipschitz.
    """
    o = H2.origin()
    hs = [BusemannFunction(ideal_point(H2), o), BusemannFunction(ideal_point(H2, [0.0]), o)]
    C = HoroballIntersection(hs, [0.5, 0.5])
    rep = contraction_audit(C, ModelPoint(H2, [1.5, 0.0]), ModelPoint(H2, [-1.0, -1.0]))
    assert rep.verdict == PASS


def test_sublevel_flow_flat():
    """
    Flat sphere minimizers move along a single ray to the mean direction.
    """
    o = E3.origin()
    hs = [BusemannFunction(boundary_point(E3, np.eye(3)[i]), o) for i in range(2)]
    f = ConvexCombination.of(hs, [0.5, 0.5])
    rep = sublevel_flow(f, o, [10.0, 20.0, 40.0, 80.0])
    assert rep.passed
    assert len(rep["steps"]) == 4
    assert max(rep["gaps"]) < 1e-6
    assert tits_distance(rep["limit"], boundary_point(E3, [1.0, 1.0, 0.0])) < 1e-6
    assert distance(rep["steps"][0].point, o) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        sublevel_flow(f, o, [10.0])


if __name__ == "__main__":
    test_flat_sphere_minimizer()
    test_project_to_intersection_kkt()
