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

from hadamardlab.errors import PreconditionError
from hadamardlab.isometries import translation
from hadamardlab.lab.scenarios import get_scenario
from hadamardlab.models import ModelPoint, boundary_point, euclidean, tits_distance
from hadamardlab.reports import INAPPLICABLE, PASS
from hadamardlab.simplex import (
    SimplexSpec,
    approximate_simplex,
    barycentric_grid,
    basepoint_independence_audit,
    boundary_candidates,
    certify_nondegenerate,
    cone_image_region,
    cone_injectivity_audit,
    degeneracy_sequential_probe,
    dimension_bound_assert,
    error_bound_audit,
    find_large_corner,
    horo_contraction_audit,
    in_cone_image,
    on_boundary,
    preserved_horosphere_audit,
    root_lemma_audit,
    simplex_limit,
)

SCHEDULE = (10.0, 20.0, 40.0)


def _flat_edge(n=2):
    """Edge in E^n between directions at angle pi/3."""
    space = euclidean(n)
    dirs = [[1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]]
    centers = []
    for d in dirs:
        v = np.zeros(n)
        v[:2] = d
        centers.append(boundary_point(space, v))
    return SimplexSpec.from_centers(centers, space.origin())


def test_barycentric_grid():
    """
    The grid of resolution m on the 2-simplex has (m+1)(m+2)/2 points.
    """
    grid = barycentric_grid(2, 4)
    assert len(grid) == 15
    assert all(sum(t) == pytest.approx(1.0) for t in grid)
    assert sum(1 for t in grid if not on_boundary(t)) == 3
    with pytest.raises(ValueError):
        barycentric_grid(1, 0)


def test_vertex_precondition():
    """
    Vertices must be pairwise at Tits distance below pi/2.
    """
    space = euclidean(2)
    o = space.origin()
    with pytest.raises(PreconditionError):
        SimplexSpec.from_centers([boundary_point(space, [1.0, 0.0]), boundary_point(space, [0.0, 1.0])], o)
    spec = _flat_edge()
    assert spec.k == 1
    assert spec.alpha == pytest.approx(math.pi / 6)


def test_lipschitz_bound():
    """
    sigma_R is Lipschitz in the parameter with constant at most 2 sqrt(k+1).
    """
    approx = approximate_simplex(_flat_edge(), 10.0, 4)
    assert approx.report.verdict == PASS
    assert len(approx.samples) == 5
    assert approx.lipschitz <= 2.0 * math.sqrt(2.0)
    assert len(approx.boundary_samples()) == 2


def test_flat_limit_and_basepoint_independence():
    """
    Flat simplices have exact limits spanning the vertex arc.
    """
    spec = _flat_edge(3)
    lim = simplex_limit(spec, SCHEDULE, 2, second_basepoint=ModelPoint(spec.space, [1.5, -2.0, 1.0]))
    assert lim.report.passed
    assert tits_distance(lim.limits[(1.0, 0.0)], spec.vertices[0].center) < 1e-6
    mid = lim.limits[(0.5, 0.5)]
    assert tits_distance(mid, spec.vertices[1].center) == pytest.approx(math.pi / 6, abs=1e-6)
    with pytest.raises(ValueError):
        simplex_limit(spec, SCHEDULE[:2], 2)


def test_horo_contraction():
    """
    Horo coordinates are 1-Lipschitz in the sup norm.
    """
    spec = _flat_edge()
    rng = np.random.default_rng(0)
    pairs = [(ModelPoint(spec.space, rng.normal(size=2)), ModelPoint(spec.space, rng.normal(size=2))) for _ in range(20)]
    assert horo_contraction_audit(spec, pairs).verdict == PASS


def test_control_simplex_is_degenerate():
    """
    Coincident vertices are flagged degeneracy-consistent.
    """
    spec = _flat_edge()
    control = SimplexSpec.from_centers([spec.vertices[0].center] * 2, spec.basepoint)
    t = (0.5, 0.5)
    seq = degeneracy_sequential_probe(control, t, boundary_candidates(control, t, SCHEDULE, 2))
    assert seq["verdict"] == "degeneracy-consistent"
    assert not certify_nondegenerate(control, SCHEDULE, 2)["certified"]


def test_flat_simplex_certified():
    """
    The flat edge has independent gradients and stays apart from its boundary.
    """
    cert = certify_nondegenerate(_flat_edge(), SCHEDULE, 2)
    assert cert["certified"] == [(0.5, 0.5)]


def test_cone_inverse_and_membership():
    """
    Projections realize sampled horo coordinates of the cone image.
    """
    spec = _flat_edge()
    image = cone_image_region(spec, (10.0, 20.0, 30.0), 2, inverse_samples=5, seed=1)
    assert image.report.verdict == PASS
    assert len(image.samples) == 1 + 3 * 3
    assert in_cone_image(spec, np.array([-1.0, -1.0]))


def test_cone_injectivity():
    """
    Distinct non-degenerate cone samples have distinct images; coincident
    vertices make every sample degenerate and collide.
    """
    spec = _flat_edge()
    rep = cone_injectivity_audit(spec, SCHEDULE, 2)
    assert rep.verdict == PASS
    assert rep["nondegenerate"] == 3
    assert rep["collisions"] == 0
    assert not rep["all_degenerate"]
    control = SimplexSpec.from_centers([spec.vertices[0].center] * 2, spec.basepoint)
    rep = cone_injectivity_audit(control, SCHEDULE, 2)
    assert rep["all_degenerate"]
    assert rep["degenerate_collisions"] > 0
    assert rep["collisions"] == 0


def test_cone_interior_by_coverage():
    """
    Interior samples sit inside the hull of their grid neighbors; boundary
    directions and the outer radius are never interior.
    """
    spec = _flat_edge()
    image = cone_image_region(spec, (10.0, 20.0, 40.0), 4, inverse_samples=3)
    inner = image.interior()
    assert inner
    assert all(not on_boundary(s["t"]) and s["R"] < 40.0 for s in inner)
    assert all(s["full_rank"] for s in inner)
    assert image.covers(inner[0]["b"])
    assert not image.covers(np.array([1.0, 1.0]))
    # outside the sector between the directions -(1, 1/2) and -(1/2, 1)
    assert not image.covers(np.array([-20.0, -2.0]))


def test_corner_grows_with_radius():
    """
    Covered corners double with the radius range; the degenerate control has none.
    """
    spec = _flat_edge()
    small = find_large_corner(cone_image_region(spec, (10.0, 20.0, 40.0), 4, inverse_samples=2))
    large = find_large_corner(cone_image_region(spec, (10.0, 20.0, 40.0, 80.0), 4, inverse_samples=2))
    assert small.anchor is not None
    assert small.scale >= 10.0
    assert large.scale > small.scale
    assert large.oracle == 1.0
    fixed = find_large_corner(cone_image_region(spec, (10.0, 20.0, 40.0, 80.0), 4, inverse_samples=2), L=small.scale)
    assert fixed.anchor is not None
    control = SimplexSpec.from_centers([spec.vertices[0].center] * 2, spec.basepoint)
    none = find_large_corner(cone_image_region(control, (10.0, 20.0, 40.0), 4, inverse_samples=2))
    assert none.anchor is None
    assert none.cells == 0.0


def test_basepoint_independence_pairs():
    """
    Sphere minimizers about basepoints at most 5 apart stay within the square-root bound.
    """
    rep = basepoint_independence_audit(_flat_edge(3), SCHEDULE, pairs=50, seed=2)
    assert rep.verdict == PASS
    assert rep["pairs"] == 50
    assert rep["max_D"] <= 5.0 + 1e-9


def test_root_lemma():
    """
    Lowering levels by |a-b|_1 moves the projection by at most the square-root bound.
    """
    spec = _flat_edge()
    x = spec.basepoint
    assert root_lemma_audit(spec, [-1.0, -1.0], [-2.0, -1.5], x).verdict == PASS
    assert root_lemma_audit(spec, [-1.0, -1.0], [0.0, -1.5], x).verdict == INAPPLICABLE


def test_error_bound_needs_invariance():
    """
    A translation moving the vertex horospheres makes the error bound inapplicable.
    """
    spec = _flat_edge()
    g = translation(spec.space, [1.0, 0.0])
    rep = error_bound_audit(spec, np.array([-1.0, -1.0]), [g], spec.basepoint, samples=2)
    assert rep.verdict == INAPPLICABLE


def test_error_bound_orthogonal_translation():
    """
    Translations orthogonal to the vertex span keep the projection error below the orbit distance.
    """
    spec = _flat_edge(3)
    g = translation(spec.space, [0.0, 0.0, 1.0])
    x = ModelPoint(spec.space, [0.5, 0.2, 2.4])
    rep = error_bound_audit(spec, np.array([-1.0, -1.0]), [g], x, samples=2)
    assert rep.verdict == PASS
    assert rep["orbit_distance"] == pytest.approx(math.hypot(0.5, 0.2, 0.4))


def test_preserved_horosphere_flat():
    """
    The rebuilt limit Busemann function is invariant under orthogonal translations.
    """
    spec = _flat_edge(3)
    g = translation(spec.space, [0.0, 0.0, 1.0])
    points = [spec.basepoint, ModelPoint(spec.space, [0.3, -0.2, 0.5])]
    rep = preserved_horosphere_audit(spec, (0.5, 0.5), [g], points, SCHEDULE)
    assert rep.verdict == PASS


def test_dimension_bound_product():
    """
    In H^2 x H^2 an edge preserved by a parabolic Z^2 meets the bound with equality.
    """
    setup = get_scenario("product-H2xH2-Z2").build()
    cert = certify_nondegenerate(setup.spec, SCHEDULE, 2)
    rep = dimension_bound_assert(setup.spec, setup.group, cert, samples=4)
    assert rep.verdict == PASS
    assert (rep["n"], rep["k"], rep["rank"]) == (4, 1, 2)
    assert rep["equality"]


if __name__ == "__main__":
    test_barycentric_grid()
    test_lipschitz_bound()
    test_control_simplex_is_degenerate()
    test_cone_injectivity()
    test_corner_grows_with_radius()
