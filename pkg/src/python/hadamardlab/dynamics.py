#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Isometry dynamics: classification, tracking rays of orbits, centers of
mass at infinity and horosphere invariance checks.
"""

import math
import warnings
from dataclasses import dataclass, field
from itertools import product as cartesian

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .busemann import displacement, inf_displacement
from .errors import (
    GeometryError,
    OrbitOverflowError,
    PreconditionError,
    SamplingWarning,
)
from .models import (
    EUCLIDEAN,
    HYPERBOLIC,
    IDEAL_POINT_TOL,
    BoundaryPoint,
    TangentVector,
    boundary_from_direction,
    distance,
    exp_map,
    geodesic_ray,
    log_map,
    random_point,
    tits_distance,
    vector_angle,
)
from .reports import INFO, Report, check, inapplicable, note

EPSILON_SCHEDULE = (0.1, 0.05, 0.02, 0.01)
POSITIVE_DISPLACEMENT = 1e-6
DISPLACEMENT_SLACK = 1e-9
ELLIPTIC_TOL = 1e-9
INVARIANT_TOL = 1e-7
SAME_POINT_TOL = 1e-9
ALPHA_MIN = 1e-6

ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC_KIND = "hyperbolic"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Classification:
    kind: str
    translation_length: float
    evidence: dict = field(default_factory=dict)


def _orbit_distances(g, x, max_doublings):
    """``d(x, g^n x)`` for ``n = 1, 2, 4, ...`` until overflow or the cap."""
    out = []
    n = 1
    for _ in range(max_doublings + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                y = g.power(n).apply(x)
            out.append((n, distance(x, y)))
        except (OrbitOverflowError, GeometryError, ArithmeticError):
            break
        n *= 2
    return out


def _min_displacement(g, x, radius):
    """Nelder-Mead minimum of d_g over the ball of the given radius about x."""
    n = x.space.n

    def point(v):
        nrm = np.linalg.norm(v)
        if nrm > radius:
            v = v * (radius / nrm)
        return exp_map(TangentVector(x, v))

    res = minimize(
        lambda v: displacement(g, point(v)),
        np.zeros(n),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000 * n},
    )
    best = float(res.fun)
    if best > ELLIPTIC_TOL:
        # restart from the best vertex to escape a collapsed simplex
        res2 = minimize(
            lambda v: displacement(g, point(v)),
            res.x,
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000 * n},
        )
        best = min(best, float(res2.fun))
    return best


def classify(g, x=None, max_doublings=16, search_radius=10.0):
    """
    Elliptic when a zero of ``d_g`` is found within ``search_radius`` of x;
    hyperbolic when the orbit increments ``d(x, g^2n x) - d(x, g^n x)`` keep
    doubling; parabolic when they stay positive and bounded (sublinear,
    concave orbit growth) with no zero of ``d_g`` found; undetermined
    otherwise.
    """
    x = g.space.origin() if x is None else x
    horizon = g.resolved_power()
    if math.isfinite(horizon):
        max_doublings = min(max_doublings, max(4, int(math.log2(max(horizon, 1.0)))))
    dists = _orbit_distances(g, x, max_doublings)
    incr = [b[1] - a[1] for a, b in zip(dists, dists[1:])]
    evidence = {"orbit": dists, "increments": incr, "horizon": horizon}
    zero = _min_displacement(g, x, search_radius)
    evidence["min_displacement"] = zero
    if zero < ELLIPTIC_TOL:
        return Classification(ELLIPTIC, 0.0, evidence)
    if len(incr) >= 4:
        last = incr[-4:]
        ratios = [b / a if a > 0.0 else math.inf for a, b in zip(last, last[1:])]
        evidence["increment_ratios"] = ratios
        if all(r > 1.5 for r in ratios):
            (n1, d1), (n2, d2) = dists[-2], dists[-1]
            # Richardson on d_n / n = A + c / n
            A = (d2 - d1) / (n2 - n1)
            if A > POSITIVE_DISPLACEMENT:
                return Classification(HYPERBOLIC_KIND, A, evidence)
        if all(v > 0.1 for v in last[1:]) and all(0.5 < r < 1.5 for r in ratios):
            return Classification(PARABOLIC, 0.0, evidence)
    return Classification(UNDETERMINED, float("nan"), evidence)


@dataclass
class TrackingResult:
    """
    A tracking ray ``c(t) = exp_y(t u)`` for the orbit ``y_k = g^k y``.

    ``ratios`` lists ``(k, d(y_k, c(A k))/k)`` on a doubling schedule.
    """

    origin: object
    direction: BoundaryPoint
    tangent: TangentVector
    A: float
    ratios: list
    good_points: dict
    report: Report


def _doubling(k_max):
    ks = []
    k = 1
    while k < k_max:
        ks.append(k)
        k *= 2
    ks.append(k_max)
    return ks


def km_tracking(g, y, k_max=10_000, eps_schedule=EPSILON_SCHEDULE):
    """
    Follow the orbit of y and fit a geodesic ray from y that the orbit
    tracks sublinearly.

    For every eps the largest record setter n of ``d(y, y_n) - (A - eps) n``
    is a good point; the chain ``(A-eps)k <= d(y,y_n) - d(y_k,y_n) <= (A+eps)k``
    and the segment bound ``d(y_k, c_n(A k))/k <= 2 sqrt(A eps) + eps`` are
    audited for ``K_eps <= k <= n``. The ray direction is the unit segment
    direction at the good point of the smallest eps.

    A is the infimum displacement: the orbit estimate of
    :func:`inf_displacement`, replaced by the closed form when the closed
    form does not exceed it. Orbit ratios only decrease to A, so a closed
    form above the estimate is recorded as a failure and the estimate is
    used instead.

    Raises
    ------
    PreconditionError
        If the infimum displacement does not exceed 1e-6.
    """
    k_max = int(k_max)
    est = inf_displacement(g, y, max(2, k_max // 2))
    closed = g.translation_length()
    A = closed if closed <= est.lower + DISPLACEMENT_SLACK else est.lower
    if A <= POSITIVE_DISPLACEMENT:
        raise PreconditionError(
            f"Tracking needs a positive infimum displacement, got A = {A:.3g} "
            f"(closed form {closed:.3g}, orbit bracket [{est.lower:.3g}, {est.upper:.3g}])"
        )
    orbit = g.orbit(y, k_max)
    D = np.array([distance(y, p) for p in orbit])
    n_idx = np.arange(k_max + 1)
    rep = Report(
        "km tracking",
        details={"A": A, "A_closed": closed, "A_bracket": (est.lower, est.upper),
                 "orbit_estimate": D[-1] / k_max},
    )
    rep.add(check("km displacement", "closed<=orbit", closed, est.lower, DISPLACEMENT_SLACK))
    rep.add(note("km displacement", "orbit width", est.width))
    good = {}
    seg_dirs = {}
    for eps in sorted(eps_schedule, reverse=True):
        score = D - (A - eps) * n_idx
        records = np.flatnonzero(score >= np.maximum.accumulate(score) - 0.0)
        records = records[records > 0]
        if records.size == 0:
            rep.add(note("km good point", f"eps={eps:g}", float("nan")))
            continue
        n = int(records[-1])
        good[eps] = n
        above = np.flatnonzero(D[1 : n + 1] > (A + eps) * n_idx[1 : n + 1] + 1e-12)
        K = int(above[-1]) + 2 if above.size else 1
        if K > n:
            rep.add(note("km chain", f"eps={eps:g}", float(K), float(n)))
            continue
        ks = np.arange(K, n + 1)
        mid = D[n] - D[n - ks]
        lower = float(np.max((A - eps) * ks - mid))
        upper = float(np.max(mid - (A + eps) * ks))
        rep.add(check("km chain lower", f"eps={eps:g},n={n}", lower, 0.0, 1e-9))
        rep.add(check("km chain upper", f"eps={eps:g},n={n}", upper, 0.0, 1e-9))
        u = log_map(y, orbit[n]).normalized()
        seg_dirs[eps] = u
        worst = 0.0
        for k in sorted(set(_doubling(n)) | {K, n}):
            if k < K:
                continue
            worst = max(worst, distance(orbit[k], exp_map(u * (A * k))) / k)
        rep.add(check("km segment", f"eps={eps:g},n={n}", worst, 2.0 * math.sqrt(A * eps) + eps, 1e-9))
    if not seg_dirs:
        raise PreconditionError("No good orbit points found for any eps")
    eps_min = min(seg_dirs)
    u = seg_dirs[eps_min]
    ratios = [(k, distance(orbit[k], exp_map(u * (A * k))) / k) for k in _doubling(k_max)]
    above = np.flatnonzero(D[1:] > (A + eps_min) * n_idx[1:] + 1e-12)
    transient = int(above[-1]) + 2 if above.size else 1
    tail = [(k, r) for k, r in ratios if k >= transient]
    worst = max((b[1] - a[1] for a, b in zip(tail, tail[1:])), default=-math.inf)
    if len(tail) > 1:
        rep.add(check("km monotone tail", f"k>={transient}", worst, 0.0, 1e-9))
    rep.add(note("km final ratio", f"k={k_max}", ratios[-1][1]))
    return TrackingResult(y, boundary_from_direction(u), u, A, ratios, good, rep)


# ---------------------------------------------------------------------------
# centers of mass at infinity
# ---------------------------------------------------------------------------


def radius_function(K, xi):
    """``rho(xi) = max_{eta in K} Td(eta, xi)``"""
    return max(tits_distance(eta, xi) for eta in K)


def _same_factor_endpoint(a, b):
    return vector_angle(a, b) < IDEAL_POINT_TOL


def _hyperbolic_choices(K, i):
    out = []
    for eta in K:
        d = eta.directions[i]
        if d is not None and not any(_same_factor_endpoint(d, e) for e in out):
            out.append(d)
    return out


@dataclass(frozen=True)
class CenterResult:
    point: BoundaryPoint
    radius: float
    agree: bool
    spread: float


class _CenterProblem:
    """Continuous parametrization of candidate centers for one discrete choice."""

    def __init__(self, space, K, fixed):
        self.space = space
        self.K = K
        self.fixed = fixed
        self.active = [i for i, (f, _) in enumerate(space.blocks)
                       if f.kind == EUCLIDEAN or fixed[i] is not None]
        self.euclid = [i for i in self.active if space.blocks[i][0].kind == EUCLIDEAN]

    @property
    def n_params(self):
        return max(len(self.active) - 1, 0) + sum(self.space.blocks[i][0].n for i in self.euclid)

    def point(self, p):
        p = np.asarray(p, dtype=float)
        m = len(self.active)
        w = np.zeros(len(self.space.blocks))
        angles = p[: max(m - 1, 0)]
        # hyperspherical coordinates folded into the positive orthant
        rem = 1.0
        for j, i in enumerate(self.active):
            if j < m - 1:
                a = abs(math.remainder(angles[j], math.pi))
                a = min(a, math.pi / 2)
                w[i] = rem * math.cos(a)
                rem *= math.sin(a)
            else:
                w[i] = rem
        dirs = [None] * len(self.space.blocks)
        pos = max(m - 1, 0)
        for i in self.active:
            f = self.space.blocks[i][0]
            if f.kind == EUCLIDEAN:
                v = p[pos : pos + f.n]
                pos += f.n
                nv = np.linalg.norm(v)
                dirs[i] = v / nv if nv > 0.0 else np.eye(f.n)[0]
            else:
                dirs[i] = self.fixed[i]
        for i in range(len(w)):
            if dirs[i] is None:
                w[i] = 0.0
        if not np.any(w):
            w[self.active[0]] = 1.0
        return BoundaryPoint(self.space, w, tuple(dirs))

    def objective(self, p):
        return radius_function(self.K, self.point(p))

    def random_start(self, rng):
        return rng.uniform(0.0, math.pi / 2, size=self.n_params) if not self.euclid else np.concatenate(
            [rng.uniform(0.0, math.pi / 2, size=max(len(self.active) - 1, 0)),
             rng.normal(size=self.n_params - max(len(self.active) - 1, 0))]
        )


def _solve_one_parameter(problem, grid=257, offset=0.0):
    """Grid minimum, shifted by offset grid steps, refined by a bounded scalar search."""
    step = (math.pi / 2) / (grid - 1)
    ts = np.clip(np.linspace(0.0, math.pi / 2, grid) + offset * step, 0.0, math.pi / 2)
    vals = [problem.objective([t]) for t in ts]
    k = int(np.argmin(vals))
    res = minimize_scalar(
        lambda t: problem.objective([t]),
        bounds=(max(ts[k] - step, 0.0), min(ts[k] + step, math.pi / 2)),
        method="bounded",
        options={"xatol": 1e-10},
    )
    if res.fun <= vals[k]:
        return [float(res.x)], float(res.fun)
    return [float(ts[k])], float(vals[k])


def center_of_finite_set(K, restarts=10, seed=0, agree_tol=1e-4):
    """
    Minimizer of ``rho(xi) = max_{eta in K} Td(eta, xi)`` over the boundary.

    Hyperbolic factors only use endpoints present in K; join weights and
    Euclidean directions are continuous parameters (shifted-grid bounded
    scalar searches for a single parameter, Nelder-Mead from random starts
    otherwise). ``spread`` is the largest Tits distance from the returned
    center to the minimizer of any restart of the winning parametrization;
    the restarts agree when it is at most ``agree_tol``.

    Raises
    ------
    PreconditionError
        If two points of K are more than pi/2 apart.
    """
    K = list(K)
    if not K:
        raise ValueError("Input Error: the set K is empty")
    space = K[0].space
    for a in range(len(K)):
        for b in range(a + 1, len(K)):
            td = tits_distance(K[a], K[b])
            if td > math.pi / 2 + 1e-9:
                raise PreconditionError(f"K has Tits diameter {td:.6g} > pi/2")
    if len(K) == 1:
        return CenterResult(K[0], 0.0, True, 0.0)
    options = []
    for i, (f, _) in enumerate(space.blocks):
        options.append(_hyperbolic_choices(K, i) + [None] if f.kind == HYPERBOLIC else [None])
    rng = np.random.default_rng(seed)
    candidates = []
    for fixed in cartesian(*options):
        problem = _CenterProblem(space, K, list(fixed))
        if not problem.active:
            continue
        if problem.n_params == 0:
            p = problem.point([])
            candidates.append((radius_function(K, p), p, [p]))
            continue
        runs = []
        if problem.n_params == 1 and not problem.euclid:
            for r in range(max(restarts, 1)):
                params, val = _solve_one_parameter(problem, offset=rng.uniform(-0.5, 0.5) if r else 0.0)
                runs.append((val, problem.point(params)))
        else:
            for r in range(max(restarts, 1)):
                x = problem.random_start(rng)
                best_fun = math.inf
                for _ in range(5):
                    # restart from the result to escape a collapsed simplex
                    res = minimize(problem.objective, x, method="Nelder-Mead",
                                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
                    x = res.x
                    if res.fun > best_fun - 1e-13:
                        break
                    best_fun = float(res.fun)
                runs.append((float(res.fun), problem.point(x)))
        runs.sort(key=lambda item: item[0])
        # every restart minimizer enters the spread
        candidates.append((runs[0][0], runs[0][1], [p for _, p in runs]))
    candidates.sort(key=lambda item: item[0])
    best_val, best, peers = candidates[0]
    spread = max((tits_distance(best, p) for p in peers), default=0.0)
    agree = spread <= agree_tol
    if not agree:
        warnings.warn(
            f"Center restarts disagree by {spread:.3g} (tolerance {agree_tol:g})",
            SamplingWarning,
        )
    return CenterResult(best, best_val, agree, spread)


class FiniteBoundarySet:
    """An explicit list of boundary points."""

    def __init__(self, points):
        self.points = list(points)
        if not self.points:
            raise ValueError("Input Error: empty boundary set")
        self.space = self.points[0].space
        if any(p.space != self.space for p in self.points):
            raise ValueError("Input Error: boundary points from different spaces")

    def samples(self):
        return list(self.points)

    def transform(self, g):
        return FiniteBoundarySet([g.apply_boundary(p) for p in self.points])

    def __len__(self):
        return len(self.points)


class JoinFan:
    """
    Join points of a two-factor product over a theta fan.

    ``factor_choices[i]`` lists unit endpoint directions allowed in factor i,
    or is None for the whole factor boundary, sampled by ``circle_samples``
    equally spaced directions (2-dimensional factors) or seeded random
    directions (higher dimensions).
    """

    def __init__(self, space, factor_choices, thetas=33, circle_samples=16, seed=0):
        if space.n_factors != 2:
            raise ValueError("Input Error: a join fan needs a two-factor product")
        self.space = space
        self.thetas = (
            np.linspace(0.0, math.pi / 2, thetas) if np.isscalar(thetas) else np.asarray(thetas)
        )
        rng = np.random.default_rng(seed)
        self.choices = []
        for choice, (f, _) in zip(factor_choices, space.blocks):
            if choice is not None:
                self.choices.append([np.asarray(c, dtype=float) for c in choice])
            elif f.n == 2:
                a = np.linspace(0.0, 2 * math.pi, circle_samples, endpoint=False)
                self.choices.append([np.array([math.cos(v), math.sin(v)]) for v in a])
            else:
                v = rng.normal(size=(circle_samples, f.n))
                self.choices.append(list(v / np.linalg.norm(v, axis=1, keepdims=True)))

    def samples(self):
        out = []
        seen = []
        for th in self.thetas:
            c, s = math.cos(th), math.sin(th)
            w = [c if c > 1e-15 else 0.0, s if s > 1e-15 else 0.0]
            for d1 in self.choices[0] if w[0] else [None]:
                for d2 in self.choices[1] if w[1] else [None]:
                    p = BoundaryPoint(self.space, np.array(w), (d1, d2))
                    if any(tits_distance(p, q) < SAME_POINT_TOL for q in seen[-64:]):
                        continue
                    seen.append(p)
                    out.append(p)
        return out

    def transform(self, g):
        return FiniteBoundarySet([g.apply_boundary(p) for p in self.samples()])

    def __len__(self):
        return len(self.samples())


def is_fixed(g, xi, tol=SAME_POINT_TOL):
    return tits_distance(g.apply_boundary(xi), xi) < tol


@dataclass
class ClassCenter:
    point: BoundaryPoint
    fixed: list
    B: list
    alpha: float
    report: Report


def class_center_of_mass(generators, F_A, restarts=10, seed=0):
    """
    Two-step center of mass: sampled ``Fix(A)`` from the F_A samples fixed by
    every generator, ``B`` the fixed samples within pi/2 of all of F_A, and
    the center of ``B``, certified against F_A and B.

    Raises
    ------
    PreconditionError
        If the sampled B is empty.
    """
    fa = F_A.samples()
    fixed = [xi for xi in fa if all(is_fixed(g, xi) for g in generators)]
    B = [xi for xi in fixed if all(tits_distance(xi, y) <= math.pi / 2 + 1e-9 for y in fa)]
    if not B:
        warnings.warn("Sampled B is empty; refine the F_A sampler", SamplingWarning)
        raise PreconditionError(
            f"Sampled B is empty ({len(fixed)} fixed of {len(fa)} F_A samples)"
        )
    center = center_of_finite_set(B, restarts=restarts, seed=seed)
    xi = center.point
    worst_f = max(tits_distance(xi, y) for y in fa)
    worst_b = max(tits_distance(xi, y) for y in B)
    alpha = math.pi / 2 - worst_b
    rep = Report("class center")
    rep.add(check("class center F_A", f"samples={len(fa)}", worst_f, math.pi / 2, 1e-6))
    # B lies in the ball of the computed radius about the center
    rep.add(check("class center B", f"samples={len(B)}", worst_b, center.radius, 1e-6))
    rep.add(check("class center alpha", "alpha>0", -alpha, -ALPHA_MIN))
    rep.add(check("class center fixed", "generators",
                  max(tits_distance(g.apply_boundary(xi), xi) for g in generators), 0.0, 1e-6))
    return ClassCenter(xi, fixed, B, alpha, rep)


# ---------------------------------------------------------------------------
# horosphere audits
# ---------------------------------------------------------------------------


def horosphere_invariance_check(g, h, samples=500, seed=0, scale=3.0, n_max=256):
    """
    ``max |h(g x) - h(x)|`` over random points, with the bound
    ``|h(g x) - h(x)| <= |g|`` audited against the displacement bracket
    when g fixes the center of h.
    """
    rng = np.random.default_rng(seed)
    pts = [random_point(h.space, rng, scale) for _ in range(samples)]
    drifts = [h(g.apply(x)) - h(x) for x in pts]
    worst = float(np.max(np.abs(drifts)))
    invariant = worst < INVARIANT_TOL
    name = "horosphere invariance"
    rep = Report(name, details={"invariant": invariant, "drift": worst})
    rep.add(note(name, "max drift", worst, INVARIANT_TOL, INFO))
    if is_fixed(g, h.center):
        est = inf_displacement(g, h.space.origin(), n_max)
        rep.add(check("busemann drift bound", "|h(gx)-h(x)|", worst, est.upper, 1e-9))
    return rep


def divergence_monotonicity_check(g, h, eta, x=None, times=None, alpha=None):
    """
    Along the ray r from x to eta: ``h(r(t)) <= h(r(0)) - t sin(alpha)`` and,
    when g fixes eta, ``d_g(r(t))`` stays below ``d_g(r(0))`` and does not
    increase.
    """
    name = "divergence"
    inv = horosphere_invariance_check(g, h, samples=32)
    if not inv["invariant"]:
        return inapplicable(name, "g does not preserve the horospheres of h")
    td = tits_distance(eta, h.center)
    if alpha is None:
        alpha = math.pi / 2 - td
    if alpha <= 0.0 or td > math.pi / 2 - alpha + 1e-12:
        return inapplicable(name, "Td(eta, center) exceeds pi/2 - alpha", tits=td)
    x = h.basepoint if x is None else x
    times = np.linspace(0.0, 50.0, 26) if times is None else np.asarray(times)
    rays = [geodesic_ray(x, eta, float(t)) for t in times]
    h0 = h(rays[0])
    worst = max(h(p) - (h0 - t * math.sin(alpha)) for t, p in zip(times, rays))
    rep = Report(name, details={"alpha": alpha, "tits": td})
    rep.add(check("busemann decay", f"alpha={alpha:.6g}", worst, 0.0, 1e-6))
    if is_fixed(g, eta):
        disp = [displacement(g, p) for p in rays]
        rep.add(check("displacement bounded", "d_g(r(t))", max(disp), disp[0], 1e-6))
        rep.add(check("displacement monotone", "d_g(r(t))",
                      max((b - a for a, b in zip(disp, disp[1:])), default=0.0), 0.0, 1e-6))
    return rep
