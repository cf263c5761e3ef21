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

from hadamardlab.busemann import (
    BusemannFunction,
    ConvexCombination,
    WeightedDisplacementSeries,
    WordLengthOracle,
    busemann_gradient,
    busemann_value,
    combination_gradient,
    displacement,
    inf_displacement,
    series_infimum,
    unit_rate_defect,
    weighted_series,
)
from hadamardlab.errors import PreconditionError
from hadamardlab.isometries import boost, parabolic, product_isometry, translation
from hadamardlab.models import (
    ModelPoint,
    boundary_point,
    distance,
    euclidean,
    half_space_point,
    hyperbolic,
    ideal_point,
    join,
    product,
    random_boundary_point,
    random_point,
)

H2 = hyperbolic(2)
H2xH2 = product(H2, H2)
coordinate = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def test_busemann_at_infinity_is_log_height():
    """
    The Busemann function of the chart infinity is minus the log height.
    """
    h = BusemannFunction(ideal_point(H2), H2.origin())
    assert busemann_value(h, half_space_point(H2, [5.0], math.e**3)) == pytest.approx(-3.0)
    assert h(H2.origin()) == 0.0


def test_busemann_euclidean_closed_form():
    """
    Euclidean Busemann functions are negative linear functionals.
    """
    space = euclidean(3)
    v = np.array([1.0, 2.0, 2.0]) / 3.0
    h = BusemannFunction(boundary_point(space, v), space.origin())
    x = ModelPoint(space, [1.0, -1.0, 4.0])
    assert h(x) == pytest.approx(-float(x.coords @ v))


@given(st.lists(coordinate, min_size=8, max_size=8))
def test_busemann_is_one_lipschitz(c):
    """
    |h(x) - h(y)| <= d(x, y) for a join Busemann function.
    """
    inf = ideal_point(H2)
    h = BusemannFunction(join(H2xH2, [inf, ideal_point(H2, [0.3])], theta=0.6), H2xH2.origin())
    x = ModelPoint(H2xH2, c[:4])
    y = ModelPoint(H2xH2, c[4:])
    assert abs(h(x) - h(y)) <= distance(x, y) + 1e-9


def test_unit_gradient_and_rate():
    """
    Busemann gradients are unit vectors and h decreases at unit rate toward its center.
    """
    rng = np.random.default_rng(0)
    for _ in range(20):
        xi = random_boundary_point(H2xH2, rng)
        h = BusemannFunction(xi, H2xH2.origin())
        x = random_point(H2xH2, rng, 2.0)
        assert np.isclose(busemann_gradient(h, x).norm(), 1.0, atol=1e-12)
        assert unit_rate_defect(h, x, 7.5) < 1e-9


def test_combination_gradient_bounds():
    """
    Pairwise angles at most pi/2 give 1/sqrt(k+1) <= |grad f_t| <= 1.
    """
    space = euclidean(3)
    o = space.origin()
    hs = [BusemannFunction(boundary_point(space, np.eye(3)[i]), o) for i in range(3)]
    f = ConvexCombination.of(hs, [1 / 3, 1 / 3, 1 / 3])
    g = combination_gradient(f, o)
    assert g.angle_condition
    assert g.within_bounds
    assert g.norm == pytest.approx(1.0 / math.sqrt(3.0))
    assert g.lower_bound == pytest.approx(1.0 / math.sqrt(3.0))


def test_combination_gradient_without_precondition():
    """
    Opposite directions violate the angle precondition; the bound is not asserted.
    """
    space = euclidean(2)
    o = space.origin()
    hs = [BusemannFunction(boundary_point(space, d), o) for d in ([1.0, 0.0], [-1.0, 0.0])]
    g = combination_gradient(ConvexCombination.of(hs, [0.5, 0.5]), o)
    assert not g.angle_condition
    assert g.within_bounds is None


def test_inf_displacement_bracket():
    """
    The doubling estimate brackets the exact translation length from above.
    """
    g = product_isometry(H2xH2, boost(H2, 1.0), parabolic(H2, 1.0))
    x = H2xH2.origin()
    est = inf_displacement(g, x, 64)
    assert est.lower <= est.upper
    assert est.lower >= g.translation_length() - 1e-9
    assert est.upper - g.translation_length() < 0.2
    assert displacement(g, x) >= g.translation_length()
    with pytest.raises(ValueError):
        inf_displacement(g, x, 1)


def test_word_length_oracle():
    """
    Word lengths in Z^2 generated by unit translations are l1 norms.
    """
    space = euclidean(2)
    a = translation(space, [1.0, 0.0], name="a")
    b = translation(space, [0.0, 1.0], name="b")
    oracle = WordLengthOracle([a, b], 3)
    assert len(oracle) == 25
    assert oracle.length(a.compose(b).compose(b)) == 3
    assert oracle.length(a.power(4)) is None


def test_series_requires_fast_decay():
    """
    The series needs c > log(2r).
    """
    space = euclidean(2)
    a = translation(space, [1.0, 0.0])
    with pytest.raises(PreconditionError):
        WeightedDisplacementSeries(WordLengthOracle([a], 2), 0.5, [a])


def test_series_infimum_formula_hyperbolic():
    """
    On the axis of a boost the truncated series equals its infimum formula.
    """
    b = boost(H2, 1.0, name="b")
    series = WeightedDisplacementSeries(WordLengthOracle([b], 6), 1.0, [b], 6)
    formula = series.infimum_formula()
    expected = 2.0 * sum(n * math.exp(-n) for n in range(1, 7))
    assert formula == pytest.approx(expected, rel=1e-12)
    value = weighted_series([b], 1.0, [b], H2.origin(), 6)
    assert value.value == pytest.approx(formula, rel=1e-9)
    best = series_infimum(series, half_space_point(H2, [0.5], 2.0))
    assert abs(best.value - formula) <= best.tail_bound + 1e-6


def test_series_infimum_formula_parabolic():
    """
    For a parabolic group the descent drives the series toward zero.
    """
    p = parabolic(H2, 1.0, name="p")
    series = WeightedDisplacementSeries(WordLengthOracle([p], 6), 1.0, [p], 6)
    assert series.infimum_formula() == 0.0
    best = series_infimum(series, H2.origin())
    assert best.value <= best.tail_bound + 1e-6


def test_series_monotone_in_cutoff():
    """
    Truncations grow with r_cut and the tail bound dominates every later increment.
    """
    E2 = euclidean(2)
    a = translation(E2, [1.0, 0.0], name="a")
    b = translation(E2, [0.0, 1.0], name="b")
    g1 = product_isometry(H2xH2, boost(H2, 1.0), None, name="g1")
    g2 = product_isometry(H2xH2, None, parabolic(H2, 1.0), name="g2")
    rng = np.random.default_rng(3)
    for gens, subgroups in (([a, b], ([a], [a, b])), ([g1, g2], ([g2], [g1, g2]))):
        oracle = WordLengthOracle(gens, 6)
        space = gens[0].space
        for subgroup in subgroups:
            series = [WeightedDisplacementSeries(oracle, 2.0, subgroup, r) for r in range(7)]
            for _ in range(3):
                x = random_point(space, rng, 2.0)
                values = [s.value(x) for s in series]
                assert all(v2 >= v1 - 1e-12 for v1, v2 in zip(values, values[1:]))
                for r, s in enumerate(series):
                    assert values[-1] - values[r] <= s.tail_bound(x) + 1e-12


if __name__ == "__main__":
    test_busemann_at_infinity_is_log_height()
    test_series_infimum_formula_hyperbolic()
    test_series_monotone_in_cutoff()
