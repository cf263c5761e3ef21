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

from hadamardlab.errors import GeometryError
from hadamardlab.isometries import (
    boost,
    identity,
    lorentz,
    parabolic,
    product_isometry,
    rotation,
    rotation_to_infinity,
    translation,
)
from hadamardlab.models import (
    distance,
    euclidean,
    hyperbolic,
    ideal_point,
    log_map,
    product,
    random_point,
    tits_distance,
)

H2 = hyperbolic(2)


def _isometries():
    space = product(H2, euclidean(2))
    c, s = math.cos(0.4), math.sin(0.4)
    return space, [
        product_isometry(space, boost(H2, 0.7), translation(euclidean(2), [1.0, -2.0])),
        product_isometry(space, parabolic(H2, 2.5), rotation(euclidean(2), [[c, -s], [s, c]])),
        product_isometry(space, rotation(H2, [[c, -s], [s, c]]), None),
    ]


def test_isometries_preserve_distance():
    """
    Every closed-form motion preserves distances, also after composition.
    """
    rng = np.random.default_rng(0)
    space, gs = _isometries()
    gs = gs + [gs[0].compose(gs[2]), gs[2].compose(gs[1]).inverse()]
    for g in gs:
        for _ in range(10):
            x = random_point(space, rng, 2.0)
            y = random_point(space, rng, 2.0)
            assert np.isclose(distance(g.apply(x), g.apply(y)), distance(x, y), rtol=1e-9, atol=1e-10)


def test_inverse_and_power():
    """
    g^-1 undoes g and g^5 equals five applications of g.
    """
    rng = np.random.default_rng(1)
    space, gs = _isometries()
    for g in gs:
        x = random_point(space, rng, 1.0)
        assert distance(g.inverse().apply(g.apply(x)), x) < 1e-9
        y = x
        for _ in range(5):
            y = g.apply(y)
        assert distance(g.power(5).apply(x), y) < 1e-8
        assert distance(g.power(-2).apply(g.power(2).apply(x)), x) < 1e-8


def test_translation_length():
    """
    Exact translation lengths of boosts, parabolics and product motions.
    """
    b = boost(H2, 1.5)
    p = parabolic(H2, 3.0)
    assert b.translation_length() == pytest.approx(1.5)
    assert p.translation_length() == 0.0
    space = product(H2, H2)
    g = product_isometry(space, boost(H2, 3.0), boost(H2, 4.0))
    assert g.translation_length() == pytest.approx(5.0)
    assert translation(euclidean(3), [1.0, 2.0, 2.0]).translation_length() == pytest.approx(3.0)


def test_lorentz_agrees_with_halfspace():
    """
    The Lorentz matrix of a half-space motion acts like the motion itself.
    """
    rng = np.random.default_rng(2)
    g = boost(H2, 0.8).compose(parabolic(H2, -1.2))
    h = lorentz(H2, g.motions[0].lorentz())
    for _ in range(10):
        x = random_point(H2, rng, 2.0)
        assert distance(g.apply(x), h.apply(x)) < 1e-9
    assert h.translation_length() == pytest.approx(0.8, rel=1e-9)


def test_boundary_action_and_differential():
    """
    Parabolics fix the chart infinity; differentials preserve tangent norms.
    """
    rng = np.random.default_rng(3)
    p = parabolic(H2, 1.0)
    inf = ideal_point(H2)
    assert tits_distance(p.apply_boundary(inf), inf) == 0.0
    g = boost(H2, 0.5).compose(rotation(H2, [[0.0, -1.0], [1.0, 0.0]]))
    x = random_point(H2, rng, 1.0)
    y = random_point(H2, rng, 1.0)
    v = log_map(x, y)
    w = g.differential(v)
    assert np.isclose(w.norm(), v.norm(), rtol=1e-9)
    assert np.allclose(w.components, log_map(g.apply(x), g.apply(y)).components, atol=1e-8)


def test_rotation_to_infinity():
    """
    The chart rotation sends the given ideal point to infinity.
    """
    xi = ideal_point(H2, [0.7])
    g = rotation_to_infinity(H2, xi.directions[0])
    assert tits_distance(g.apply_boundary(xi), ideal_point(H2)) == 0.0


def test_commuting_parabolics():
    """
    Parabolics about the same point commute; a boost and a parabolic do not.
    """
    assert parabolic(H2, 1.0).commutes_with(parabolic(H2, 2.0))
    assert not boost(H2, 1.0).commutes_with(parabolic(H2, 1.0))
    assert identity(H2).is_identity()


def test_factor_mismatch():
    """
    Factor isometries must act on the matching factor.
    """
    space = product(H2, H2)
    with pytest.raises(GeometryError):
        product_isometry(space, translation(euclidean(2), [1.0, 0.0]), None)
    with pytest.raises(GeometryError):
        translation(H2, [1.0, 0.0])


def _rot(a):
    return [[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]]


def test_conjugated_parabolic_translation_length():
    """
    Conjugating into a full Lorentz matrix keeps parabolics at zero length
    and hyperbolics at their length, even when the matrix entries are large.
    """
    r = rotation(H2, _rot(0.7))
    for s in (1.0, 30.0):
        g = parabolic(H2, s).conjugate(r)
        assert g.translation_length() < 1e-6
        assert 1.0 < g.resolved_power() < math.inf
    h = boost(H2, 1.0).conjugate(r)
    assert h.translation_length() == pytest.approx(1.0, abs=1e-9)
    h = boost(H2, 0.3).compose(parabolic(H2, 30.0)).conjugate(r)
    assert h.translation_length() == pytest.approx(0.3, abs=1e-6)
    assert parabolic(H2, 2.0).resolved_power() == math.inf


if __name__ == "__main__":
    test_isometries_preserve_distance()
    test_translation_length()
    test_conjugated_parabolic_translation_length()
