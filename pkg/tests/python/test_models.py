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

from hadamardlab.errors import GeometryError
from hadamardlab.models import (
    ModelPoint,
    angle_at,
    boundary_point,
    distance,
    euclidean,
    exp_map,
    geodesic_ray,
    half_space_point,
    hyperbolic,
    ideal_point,
    join,
    log_map,
    minkowski_dot,
    point_from_hyperboloid,
    product,
    random_boundary_point,
    random_point,
    tits_distance,
    tits_distance_limit,
)

coordinate = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
H2 = hyperbolic(2)
H2xH2 = product(H2, H2)


def test_euclidean_distance():
    """
    Euclidean distance is the norm of the coordinate difference.
    """
    space = euclidean(3)
    p = ModelPoint(space, [1.0, 2.0, 3.0])
    q = ModelPoint(space, [4.0, 6.0, 3.0])
    assert distance(p, q) == pytest.approx(5.0, rel=1e-15)


@given(st.lists(coordinate, min_size=4, max_size=4))
def test_hyperbolic_distance_matches_hyperboloid(c):
    """
    The log-space chart distance agrees with arccosh(-<x, y>) on the hyperboloid.
    """
    p = ModelPoint(H2, c[:2])
    q = ModelPoint(H2, c[2:])
    expected = math.acosh(max(1.0, -minkowski_dot(p.hyperboloid(), q.hyperboloid())))
    assert np.isclose(distance(p, q), expected, rtol=1e-9, atol=1e-7)


def test_hyperboloid_round_trip():
    """
    Hyperboloid coordinates convert back to the same chart point.
    """
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = random_point(H2xH2, rng, 3.0)
        q = point_from_hyperboloid(H2xH2, p.hyperboloid())
        assert np.allclose(p.coords, q.coords, rtol=0.0, atol=1e-10)


@given(st.lists(coordinate, min_size=8, max_size=8))
def test_exp_inverts_log(c):
    """
    exp_x(log_x(y)) returns y in a product of hyperbolic planes.
    """
    x = ModelPoint(H2xH2, c[:4])
    y = ModelPoint(H2xH2, c[4:])
    z = exp_map(log_map(x, y))
    assert distance(y, z) < 1e-8
    assert np.isclose(log_map(x, y).norm(), distance(x, y), rtol=1e-10, atol=1e-12)


@given(st.lists(coordinate, min_size=12, max_size=12))
def test_triangle_inequality(c):
    """
    The product metric satisfies the triangle inequality.
    """
    x, y, z = (ModelPoint(H2xH2, c[i : i + 4]) for i in (0, 4, 8))
    assert distance(x, z) <= distance(x, y) + distance(y, z) + 1e-9


def test_geodesic_ray_unit_speed():
    """
    Rays to boundary points advance at unit speed, also at large parameters.
    """
    rng = np.random.default_rng(7)
    for space in (euclidean(3), hyperbolic(3), H2xH2):
        for _ in range(10):
            x = random_point(space, rng, 2.0)
            xi = random_boundary_point(space, rng)
            for t in (0.5, 10.0, 300.0):
                assert np.isclose(distance(x, geodesic_ray(x, xi, t)), t, rtol=1e-9)


def test_vertical_ray_is_exact():
    """
    The ray to the chart point at infinity moves the log height only.
    """
    x = half_space_point(H2, [0.3], 2.0)
    p = geodesic_ray(x, ideal_point(H2), 5000.0)
    assert p.coords[0] == 0.3
    assert p.coords[1] == pytest.approx(math.log(2.0) + 5000.0, rel=1e-15)


def test_tits_distance_of_joins():
    """
    Joins of the same factor endpoints are apart by the difference of join angles.
    """
    inf = ideal_point(H2)
    a = join(H2xH2, [inf, inf], theta=math.pi / 8)
    b = join(H2xH2, [inf, inf], theta=3 * math.pi / 8)
    assert tits_distance(a, b) == pytest.approx(math.pi / 4, abs=1e-12)
    assert tits_distance(b, a) == pytest.approx(math.pi / 4, abs=1e-12)


def test_tits_distance_hyperbolic_is_discrete():
    """
    Distinct ideal points of H^n are at Tits distance pi.
    """
    assert tits_distance(ideal_point(H2), ideal_point(H2, [0.0])) == pytest.approx(math.pi)
    assert tits_distance(ideal_point(H2), ideal_point(H2)) == 0.0


def test_tits_distance_limit_matches_closed_form():
    """
    The ray-separation limit reproduces the Euclidean angle.
    """
    space = euclidean(2)
    a = boundary_point(space, [1.0, 0.0])
    b = boundary_point(space, [math.cos(1.0), math.sin(1.0)])
    assert tits_distance_limit(a, b) == pytest.approx(1.0, abs=1e-6)


def test_angle_below_tits_distance():
    """
    The angle seen from any point never exceeds the Tits distance.
    """
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = random_point(H2xH2, rng, 2.0)
        xi = random_boundary_point(H2xH2, rng)
        eta = random_boundary_point(H2xH2, rng)
        assert angle_at(x, xi, eta) <= tits_distance(xi, eta) + 1e-9


def test_mismatched_spaces():
    """
    Points of different spaces cannot be compared.
    """
    with pytest.raises(GeometryError):
        distance(euclidean(2).origin(), H2.origin())
    with pytest.raises(GeometryError):
        boundary_point(H2xH2, [1.0, 0.0])
    with pytest.raises(ValueError):
        join(H2xH2, [ideal_point(H2), ideal_point(H2)], theta=2.0)


if __name__ == "__main__":
    test_euclidean_distance()
    test_geodesic_ray_unit_speed()
    test_tits_distance_of_joins()
