#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Busemann functions, convex combinations of them, displacement functions
and weighted displacement series over an enumerated group.
"""

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .errors import GeometryError, OrbitOverflowError, PreconditionError
from .isometries import identity
from .models import (
    HYPERBOLIC,
    BoundaryPoint,
    ModelPoint,
    TangentVector,
    _hyp_busemann,
    direction_to,
    distance,
    geodesic_ray,
    log_map,
    vector_angle,
)
from .parallel import parallel_map

UNIT_GRADIENT_TOL = 1e-10
# largest chart height exponent used by the series descent
MAX_LOG_HEIGHT = 60.0


def _raw_busemann(xi, x):
    total = 0.0
    for w, d, (f, sl) in zip(xi.weights, xi.directions, x.space.blocks):
        if d is None:
            continue
        c = x.coords[sl]
        if f.kind == HYPERBOLIC:
            total += w * _hyp_busemann(c, d)
        else:
            total -= w * float(c @ d)
    return total


@dataclass(frozen=True, eq=False)
class BusemannFunction:
    """
    Busemann function of ``center``, normalized so that it vanishes at
    ``basepoint``.
    """

    center: BoundaryPoint
    basepoint: ModelPoint

    def __post_init__(self):
        if self.center.space != self.basepoint.space:
            raise GeometryError("Center and basepoint live in different spaces")
        object.__setattr__(self, "_offset", _raw_busemann(self.center, self.basepoint))

    @property
    def space(self):
        return self.basepoint.space

    def __call__(self, x):
        return busemann_value(self, x)

    def gradient(self, x):
        return busemann_gradient(self, x)

    def rebased(self, basepoint):
        return BusemannFunction(self.center, basepoint)


def busemann_value(h, x):
    if x.space != h.space:
        raise GeometryError(f"Point of {x.space} given to a Busemann function of {h.space}")
    return _raw_busemann(h.center, x) - h._offset


def busemann_gradient(h, x):
    """Unit gradient; its negative is the initial tangent of [x, center)."""
    return -direction_to(x, h.center)


@dataclass(frozen=True, eq=False)
class ConvexCombination:
    """``f_t = sum_i t_i h_i`` with ``t_i >= 0`` and ``sum t_i = 1``."""

    parts: tuple

    def __post_init__(self):
        parts = tuple((float(t), h) for t, h in self.parts)
        if not parts:
            raise ValueError("Input Error: a convex combination needs at least one part")
        ts = np.array([t for t, _ in parts])
        if np.any(ts < -1e-15) or abs(ts.sum() - 1.0) > 1e-12:
            raise ValueError(f"Input Error: weights {ts} are not barycentric")
        space = parts[0][1].space
        if any(h.space != space for _, h in parts):
            raise GeometryError("Combination parts live in different spaces")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, functions, t):
        return cls(tuple(zip(t, functions)))

    @property
    def space(self):
        return self.parts[0][1].space

    @property
    def weights(self):
        return np.array([t for t, _ in self.parts])

    @property
    def functions(self):
        return [h for _, h in self.parts]

    def value(self, x):
        return sum(t * h(x) for t, h in self.parts if t != 0.0)

    def __call__(self, x):
        return self.value(x)

    def gradient(self, x):
        total = np.zeros(x.space.n)
        for t, h in self.parts:
            if t != 0.0:
                total += t * busemann_gradient(h, x).components
        return TangentVector(x, total)


@dataclass(frozen=True)
class CombinationGradient:
    """
    Gradient of a convex combination with its norm audit.

    ``within_bounds`` is None when the pairwise-angle precondition fails and
    the lower bound ``1/sqrt(k+1)`` is therefore not asserted.
    """

    vector: TangentVector
    norm: float
    lower_bound: float
    max_pair_angle: float
    angle_condition: bool
    within_bounds: object


def combination_gradient(f, x, tol=1e-9):
    grads = [busemann_gradient(h, x).components for _, h in f.parts]
    vec = f.gradient(x)
    norm = vec.norm()
    k = len(f.parts) - 1
    max_angle = 0.0
    for a, b in combinations(grads, 2):
        max_angle = max(max_angle, vector_angle(a, b))
    ok = max_angle <= math.pi / 2 + tol
    lower = 1.0 / math.sqrt(k + 1)
    within = None
    if ok:
        within = bool(lower - tol <= norm <= 1.0 + tol)
    return CombinationGradient(vec, norm, lower, max_angle, ok, within)


# ---------------------------------------------------------------------------
# displacement
# ---------------------------------------------------------------------------


def displacement(g, x):
    """d_g(x) = d(x, g x)"""
    return distance(x, g.apply(x))


def displacement_gradient(g, x):
    """Gradient of d_g at x; zero where g fixes x."""
    gx = g.apply(x)
    d = distance(x, gx)
    if d == 0.0:
        return TangentVector(x, np.zeros(x.space.n))
    u1 = log_map(x, gx)
    u2 = g.inverse().differential(log_map(gx, x))
    return TangentVector(x, -(u1.components + u2.components) / d)


@dataclass(frozen=True)
class DisplacementEstimate:
    """
    ``estimate = d(x, g^n x)/n`` for ``n = n_max`` and the bracket
    ``[d(x, g^2n x)/2n, d(x, g^n x)/n]`` around the infimum displacement.
    ``schedule`` lists ``(n, d(x, g^n x)/n)`` on the doubling schedule.
    """

    estimate: float
    lower: float
    upper: float
    schedule: tuple

    @property
    def width(self):
        return self.upper - self.lower


def _orbit_ratio(g, x, n):
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            y = g.power(n).apply(x)
    except (GeometryError, OverflowError) as e:
        if isinstance(e, OrbitOverflowError):
            raise
        raise OrbitOverflowError(
            f"Orbit point g^{n} x overflowed; use a smaller n_max ({e})"
        )
    return distance(x, y) / n


def inf_displacement(g, x, n_max=64):
    """
    Estimate the infimum displacement ``|g| = lim d(x, g^n x)/n``.

    The sequence ``d(x, g^n x)`` is subadditive, so the ratios are
    nonincreasing along the doubling schedule ``1, 2, 4, ...``.
    """
    n_max = int(n_max)
    if n_max < 2:
        raise ValueError(f"Input Error: n_max must be at least 2, got {n_max}")
    ns = []
    n = 1
    while n < n_max:
        ns.append(n)
        n *= 2
    ns.extend([n_max, 2 * n_max])
    schedule = tuple((n, _orbit_ratio(g, x, n)) for n in ns)
    upper = schedule[-2][1]
    lower = schedule[-1][1]
    return DisplacementEstimate(upper, min(lower, upper), upper, schedule)


# ---------------------------------------------------------------------------
# word enumeration and the weighted displacement series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WordEntry:
    length: int
    word: tuple
    element: object

    def sort_key(self):
        return (self.length, self.word)


class WordLengthOracle:
    """
    Breadth-first enumeration of the word ball of radius ``radius`` in the
    generators and their inverses.

    Elements are hash-consed by their parameters rounded to 1e-10, so the
    stored length is the length of the first word reaching an element: an
    upper bound for the exact word length.
    Letters are encoded ``2i`` for generator ``i`` and ``2i+1`` for its
    inverse.
    """

    def __init__(self, generators, radius):
        if not generators:
            raise ValueError("Input Error: at least one generator is required")
        self.generators = list(generators)
        self.radius = int(radius)
        space = self.generators[0].space
        letters = []
        for g in self.generators:
            letters.extend([g, g.inverse()])
        self.letters = letters
        e = identity(space)
        self._entries = {e.key(): WordEntry(0, (), e)}
        frontier = deque([e.key()])
        while frontier:
            key = frontier.popleft()
            entry = self._entries[key]
            if entry.length >= self.radius:
                continue
            for i, a in enumerate(letters):
                g = entry.element.compose(a)
                k = g.key()
                if k not in self._entries:
                    self._entries[k] = WordEntry(entry.length + 1, entry.word + (i,), g)
                    frontier.append(k)

    @property
    def rank(self):
        return len(self.generators)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, g):
        return g.key() in self._entries

    def length(self, g):
        """Word length of g, or None outside the enumerated ball."""
        entry = self._entries.get(g.key())
        return None if entry is None else entry.length

    def word(self, g):
        entry = self._entries.get(g.key())
        return None if entry is None else entry.word

    def entries(self):
        """All enumerated elements, sorted by length then word."""
        return sorted(self._entries.values(), key=WordEntry.sort_key)


class WeightedDisplacementSeries:
    """
    The truncated series ``f_A(x) = sum_{g in A, |g|_w <= R} exp(-c |g|_w) d_g(x)``.

    Parameters
    ----------
    oracle : WordLengthOracle
        Word lengths in the ambient group generated by ``r`` generators.
    c : float
        Decay rate; must exceed ``log(2 r)``.
    subgroup : list of Isometry
        Generators of A.
    r_cut : int
        Truncation word length, at most the oracle radius.
    """

    def __init__(self, oracle, c, subgroup, r_cut=None):
        r = oracle.rank
        if c <= math.log(2 * r):
            raise PreconditionError(
                f"c = {c} must exceed log(2r) = {math.log(2 * r):.6g}; the series may diverge"
            )
        self.oracle = oracle
        self.c = float(c)
        self.r_cut = oracle.radius if r_cut is None else int(r_cut)
        if self.r_cut > oracle.radius:
            raise ValueError(
                f"Input Error: r_cut={self.r_cut} exceeds the enumerated radius {oracle.radius}"
            )
        self.subgroup = list(subgroup)
        self.terms = self._enumerate_subgroup()

    def _enumerate_subgroup(self):
        space = self.oracle.generators[0].space
        e = identity(space)
        seen = {e.key(): e}
        frontier = deque([e])
        letters = []
        for g in self.subgroup:
            letters.extend([g, g.inverse()])
        while frontier:
            g = frontier.popleft()
            for a in letters:
                ga = g.compose(a)
                k = ga.key()
                if k in seen:
                    continue
                length = self.oracle.length(ga)
                if length is None or length > self.r_cut:
                    continue
                seen[k] = ga
                frontier.append(ga)
        terms = []
        for g in seen.values():
            entry = self.oracle._entries[g.key()]
            terms.append((entry, math.exp(-self.c * entry.length)))
        terms.sort(key=lambda item: item[0].sort_key())
        return terms

    def __len__(self):
        return len(self.terms)

    def value(self, x):
        values = parallel_map(lambda item: item[1] * displacement(item[0].element, x), self.terms)
        return float(math.fsum(values))

    def __call__(self, x):
        return self.value(x)

    def gradient(self, x):
        total = np.zeros(x.space.n)
        for entry, w in self.terms:
            if entry.length == 0:
                continue
            total += w * displacement_gradient(entry.element, x).components
        return TangentVector(x, total)

    def tail_bound(self, x):
        """Bound on the omitted terms of word length above ``r_cut``."""
        q = 2 * self.oracle.rank * math.exp(-self.c)
        r = self.r_cut
        tail = q ** (r + 1) * ((r + 1) - r * q) / (1.0 - q) ** 2
        return tail * max(displacement(g, x) for g in self.oracle.generators)

    def infimum_formula(self):
        """Truncated ``sum omega(g) |g|`` from exact translation lengths."""
        return float(
            math.fsum(w * entry.element.translation_length() for entry, w in self.terms)
        )


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_bound: float


def weighted_series(generators, c, subgroup, x, r_cut):
    """Evaluate the truncated weighted series at x with its tail bound."""
    oracle = WordLengthOracle(generators, r_cut)
    series = WeightedDisplacementSeries(oracle, c, subgroup, r_cut)
    return SeriesValue(series.value(x), series.tail_bound(x))


@dataclass(frozen=True)
class SeriesMinimum:
    point: ModelPoint
    value: float
    tail_bound: float
    iterations: int


def _chart_gradient(space, coords, frame_grad):
    out = np.array(frame_grad, dtype=float)
    for f, sl in space.blocks:
        if f.kind == HYPERBOLIC:
            block = out[sl]
            block[:-1] *= math.exp(-coords[sl][-1])
            out[sl] = block
    return out


def series_infimum(series, x0, maxiter=20000):
    """
    Minimize a truncated series by bounded quasi-Newton descent in chart
    coordinates; chart heights are capped at ``exp(MAX_LOG_HEIGHT)``.
    """
    space = x0.space
    bounds = []
    for f, _ in space.blocks:
        if f.kind == HYPERBOLIC:
            bounds.extend([(None, None)] * (f.n - 1) + [(None, MAX_LOG_HEIGHT)])
        else:
            bounds.extend([(None, None)] * f.n)

    def fun(c):
        x = ModelPoint(space, c)
        return series.value(x), _chart_gradient(space, c, series.gradient(x).components)

    res = minimize(
        fun,
        np.array(x0.coords),
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options={"ftol": 0.0, "gtol": 1e-20, "maxiter": maxiter},
    )
    point = ModelPoint(space, res.x)
    return SeriesMinimum(point, float(res.fun), series.tail_bound(point), int(res.nit))


def unit_rate_defect(h, x, t):
    """|h(ray(t)) - (h(x) - t)| along the ray from x to the center of h."""
    return abs(h(geodesic_ray(x, h.center, t)) - (h(x) - t))
