#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Constrained convex minimization on geodesic spheres and closest-point
projections to horoballs and their intersections.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar, nnls, root

from .busemann import ConvexCombination
from .errors import (
    ConvergenceError,
    GeometryError,
    InconclusiveLimitWarning,
    InfeasibleError,
)
from .models import (
    EUCLIDEAN,
    HYPERBOLIC,
    IDEAL_POINT_TOL,
    ModelPoint,
    TangentVector,
    _hyp_busemann,
    _hyp_direction_to,
    _hyp_exp,
    angle_between_points,
    boundary_from_direction,
    distance,
    exp_map,
    geodesic_ray,
    log_map,
    parallel_transport,
    vector_angle,
)
from .reports import INCONCLUSIVE, Report, check, inapplicable, note

SPHERE_TOL = 1e-8
SPHERE_MAX_ITER = 10_000
KKT_TOL = 1e-7
FEASIBILITY_TOL = 1e-9
INTERSECTION_MAX_ITER = 100_000
PREFLOW_STEPS = 1000
CIRCLE_GRID = 72


@dataclass(frozen=True)
class SphereMinimum:
    """
    Minimizer on a geodesic sphere.

    ``residual`` is the angle between ``-grad f`` and the outward radial
    direction at ``point``.
    """

    point: ModelPoint
    residual: float
    iterations: int
    value: float = float("nan")


def _outward(x, center):
    v = log_map(x, center).components
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        return None
    return -v / nrm


def radial_residual(grad, x, center):
    """Angle between ``-grad`` and the outward radial direction at x."""
    n = _outward(x, center)
    g = np.asarray(grad, dtype=float)
    if n is None or not np.any(g):
        return 0.0 if not np.any(g) else math.pi
    return vector_angle(-g, n)


def _retract(center, y, r):
    v = log_map(center, y)
    nrm = v.norm()
    if nrm == 0.0:
        raise GeometryError("Retraction through the sphere center")
    return exp_map(v * (r / nrm))


def _circle_point(space, c0, r, alpha):
    w = r * np.array([math.cos(alpha), math.sin(alpha)])
    if space.kind == HYPERBOLIC:
        return _hyp_exp(c0, w)
    return c0 + w


def _circle_search(space, c0, r, value, grad, tol):
    """
    Minimize on a circle of a 2-dimensional space: grid bracketing, then a
    root of the tangential gradient component.
    """
    alphas = np.linspace(-math.pi, math.pi, CIRCLE_GRID, endpoint=False)
    vals = [value(_circle_point(space, c0, r, a)) for a in alphas]
    k = int(np.argmin(vals))
    step = alphas[1] - alphas[0]
    lo, hi = alphas[k] - step, alphas[k] + step

    def tangential(a):
        c = _circle_point(space, c0, r, a)
        x = ModelPoint(space, c)
        n = _outward(x, ModelPoint(space, c0))
        g = grad(c)
        return float(g @ np.array([-n[1], n[0]]))

    evaluations = [0]
    try:
        flo, fhi = tangential(lo), tangential(hi)
        if flo * fhi < 0.0:
            a, res = brentq(tangential, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                            full_output=True)
            evaluations[0] = res.function_calls
        else:
            raise ValueError("no sign change")
    except ValueError:
        res = minimize_scalar(
            lambda a: value(_circle_point(space, c0, r, a)),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        a = float(res.x)
        evaluations[0] = int(res.nfev)
    return _circle_point(space, c0, r, a), CIRCLE_GRID + evaluations[0]


def _sphere_descent(space, center, r, value, grad, start, tol, max_iter):
    """
    Riemannian gradient descent restricted to S_center(r): tangential
    gradient step, exponential map, radial retraction, Armijo backtracking.
    """
    x = _retract(center, start, r)
    fx = value(x)
    eta = r
    best = (x, math.pi)
    for it in range(max_iter):
        g = grad(x)
        n = _outward(x, center)
        resid = radial_residual(g.components, x, center)
        if resid < best[1]:
            best = (x, resid)
        if resid < tol:
            return x, resid, it
        gt = g.components - (g.components @ n) * n
        gt_sq = float(gt @ gt)
        accepted = False
        while eta > 1e-14 * max(r, 1.0):
            y = _retract(center, exp_map(TangentVector(x, -eta * gt)), r)
            fy = value(y)
            if fy <= fx - 1e-4 * eta * gt_sq:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            # line search stalled at machine precision
            return best[0], best[1], it
        x, fx = y, fy
        eta *= 2.0
    raise ConvergenceError(
        f"Sphere descent did not converge in {max_iter} iterations",
        best=best[0],
        residual=best[1],
        iterations=max_iter,
    )


class _FactorProblem:
    """One factor's share ``F_i = sum_j coef_j h_j`` of a Busemann combination."""

    def __init__(self, space, c0, terms, tol, max_iter):
        self.space = space
        self.c0 = np.array(c0)
        self.tol = tol
        self.max_iter = max_iter
        merged = []
        for coef, d in terms:
            for m in merged:
                if vector_angle(m[1], d) < IDEAL_POINT_TOL:
                    m[0] += coef
                    break
            else:
                merged.append([coef, np.array(d)])
        self.terms = [(c, d) for c, d in merged if c > 0.0]
        self._cache = {}

    @property
    def closed_form(self):
        return self.space.kind == EUCLIDEAN or len(self.terms) <= 1

    def value(self, c):
        total = 0.0
        for coef, d in self.terms:
            if self.space.kind == HYPERBOLIC:
                total += coef * _hyp_busemann(c, d)
            else:
                total -= coef * float(c @ d)
        return total

    def grad(self, c):
        g = np.zeros(self.space.n)
        for coef, d in self.terms:
            if self.space.kind == HYPERBOLIC:
                g -= coef * _hyp_direction_to(c, d)
            else:
                g -= coef * d
        return g

    def solve(self, r):
        """(chart coords, gradient norm, iterations) of the minimizer on S(r)."""
        if r in self._cache:
            return self._cache[r]
        out = self._solve(r)
        self._cache[r] = out
        return out

    def _solve(self, r):
        c0 = self.c0
        if r == 0.0:
            return c0, float(np.linalg.norm(self.grad(c0))), 0
        if self.space.kind == EUCLIDEAN:
            v = -self.grad(c0)
            nv = float(np.linalg.norm(v))
            direction = v / nv if nv > 0.0 else np.eye(self.space.n)[0]
            return c0 + r * direction, nv, 0
        if not self.terms:
            e = np.zeros(self.space.n)
            e[-1] = r
            return _hyp_exp(c0, e), 0.0, 0
        if len(self.terms) == 1:
            coef, d = self.terms[0]
            w = r * _hyp_direction_to(c0, d)
            return _hyp_exp(c0, w), coef, 0
        if self.space.n == 2:
            c, its = _circle_search(self.space, c0, r, self.value, self.grad, self.tol)
        else:
            center = ModelPoint(self.space, c0)
            start = exp_map(TangentVector(center, -r * self.grad(c0) / np.linalg.norm(self.grad(c0))))
            x, _, its = _sphere_descent(
                self.space,
                center,
                r,
                lambda p: self.value(p.coords),
                lambda p: TangentVector(p, self.grad(p.coords)),
                start,
                self.tol,
                self.max_iter,
            )
            c = x.coords
        return c, float(np.linalg.norm(self.grad(c))), its


def _factor_problems(f, x0, tol, max_iter):
    problems = []
    for i, (fs, sl) in enumerate(x0.space.blocks):
        terms = []
        for t, h in f.parts:
            w = h.center.weights[i]
            d = h.center.directions[i]
            if t > 0.0 and d is not None and w > 0.0:
                terms.append((t * w, d))
        problems.append(_FactorProblem(fs, x0.coords[sl], terms, tol, max_iter))
    return problems


def _split_two(problems, R):
    p1, p2 = problems

    def g(phi):
        _, n1, _ = p1.solve(R * math.cos(phi))
        _, n2, _ = p2.solve(R * math.sin(phi))
        return math.sin(phi) * n1 - math.cos(phi) * n2

    if p1.closed_form and p2.closed_form:
        _, n1, _ = p1.solve(R)
        _, n2, _ = p2.solve(R)
        return math.atan2(n2, n1) if n1 or n2 else math.pi / 4
    try:
        return brentq(g, 0.0, math.pi / 2, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    except ValueError:
        res = minimize_scalar(
            lambda phi: p1.value(p1.solve(R * math.cos(phi))[0])
            + p2.value(p2.solve(R * math.sin(phi))[0]),
            bounds=(0.0, math.pi / 2),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return float(res.x)


def _split_many(problems, R, tol, max_iter):
    """Radius shares on the weight sphere: normalized fixed point, then descent."""
    m = len(problems)
    omega = np.full(m, 1.0 / math.sqrt(m))

    def norms(om):
        return np.array([p.solve(R * o)[1] for p, o in zip(problems, om)])

    def total(om):
        return sum(p.value(p.solve(R * o)[0]) for p, o in zip(problems, om))

    for _ in range(max_iter):
        gn = norms(omega)
        target = gn / np.linalg.norm(gn) if np.any(gn) else omega
        if np.linalg.norm(target - omega) < tol:
            return target
        # descent on the sphere: gradient of total is -R*gn, tangential part only
        grad = -R * gn
        grad_t = grad - (grad @ omega) * omega
        step = 1.0 / R
        f0 = total(omega)
        while step > 1e-16:
            cand = np.clip(omega - step * grad_t, 0.0, None)
            cand /= np.linalg.norm(cand)
            if total(cand) <= f0 - 1e-4 * step * float(grad_t @ grad_t):
                break
            step *= 0.5
        else:
            return target
        omega = cand
    return omega


def minimize_on_sphere(f, x0, R, tol=SPHERE_TOL, max_iter=SPHERE_MAX_ITER, start=None):
    """
    Minimize a convex function on the geodesic sphere ``S_{x0}(R)``.

    Parameters
    ----------
    f : ConvexCombination or object with ``value(x)`` and ``gradient(x)``
        Combinations of Busemann functions are split over product factors
        and solved factor by factor; any other handle is minimized by sphere
        constrained gradient descent.
    x0 : ModelPoint
    R : float
        Sphere radius, positive.

    Returns
    -------
    SphereMinimum
        The minimizer, certified by the angle between ``-grad f`` and the
        outward radial direction.

    Raises
    ------
    ConvergenceError
        When the certificate stays above ``tol`` after ``max_iter`` steps.
    """
    if R <= 0.0:
        raise ValueError(f"Input Error: sphere radius must be positive, got {R}")
    if isinstance(f, ConvexCombination):
        if f.space != x0.space:
            raise GeometryError("Function and sphere center live in different spaces")
        return _minimize_combination(f, x0, R, tol, max_iter)
    return _minimize_handle(f, x0, R, tol, max_iter, start)


def _minimize_combination(f, x0, R, tol, max_iter):
    problems = _factor_problems(f, x0, tol, max_iter)
    if len(problems) == 1:
        radii = [R]
    elif len(problems) == 2:
        phi = _split_two(problems, R)
        radii = [R * math.cos(phi), R * math.sin(phi)]
    else:
        radii = list(R * _split_many(problems, R, tol, max_iter))
    parts = []
    iterations = 0
    for p, r in zip(problems, radii):
        c, _, its = p.solve(r)
        parts.append(c)
        iterations += its
    x = ModelPoint(x0.space, np.concatenate(parts))
    resid = radial_residual(f.gradient(x).components, x, x0)
    if resid > tol and not _tolerable(resid, R):
        raise ConvergenceError(
            f"Sphere minimum certificate {resid:.3g} above tolerance {tol:.3g}",
            best=x,
            residual=resid,
            iterations=iterations,
        )
    return SphereMinimum(x, resid, iterations, f.value(x))


def _tolerable(resid, R):
    # the radius split is solved to double precision in phi; allow its roundoff
    return resid < 64 * np.finfo(float).eps * max(1.0, R)


def _minimize_handle(f, x0, R, tol, max_iter, start):
    space = x0.space
    if start is None:
        g = f.gradient(x0).components
        if np.any(g):
            v = -g / np.linalg.norm(g)
        else:
            v = np.zeros(space.n)
            v[-1] = 1.0
        start = exp_map(TangentVector(x0, R * v))
    if space.n == 2 and space.n_factors == 1:
        c, its = _circle_search(
            space,
            x0.coords,
            R,
            lambda c: f.value(ModelPoint(space, c)),
            lambda c: f.gradient(ModelPoint(space, c)).components,
            tol,
        )
        x = ModelPoint(space, c)
    else:
        x, _, its = _sphere_descent(
            space, x0, R, f.value, f.gradient, start, tol, max_iter
        )
    resid = radial_residual(f.gradient(x).components, x, x0)
    return SphereMinimum(x, resid, its, f.value(x))


# ---------------------------------------------------------------------------
# horoballs
# ---------------------------------------------------------------------------


def project_to_horoball(h, level, x):
    """Closest point of ``{h <= level}`` to x: slide along the ray to the center."""
    excess = h(x) - level
    if excess <= 0.0:
        return x
    return geodesic_ray(x, h.center, excess)


@dataclass(frozen=True, eq=False)
class HoroballIntersection:
    """``{x : h_i(x) <= b_i for all i}``"""

    functions: tuple
    levels: np.ndarray
    witness: object = None

    def __post_init__(self):
        fs = tuple(self.functions)
        b = np.array(self.levels, dtype=float).reshape(-1)
        if len(fs) != b.shape[0] or not fs:
            raise ValueError("Input Error: one level per Busemann function is required")
        space = fs[0].space
        if any(h.space != space for h in fs):
            raise GeometryError("Constraints live in different spaces")
        b.flags.writeable = False
        object.__setattr__(self, "functions", fs)
        object.__setattr__(self, "levels", b)

    @classmethod
    def of(cls, constraints, witness=None):
        hs, bs = zip(*constraints)
        return cls(hs, bs, witness)

    @property
    def space(self):
        return self.functions[0].space

    def with_levels(self, levels):
        return HoroballIntersection(self.functions, levels)

    def values(self, x):
        return np.array([h(x) for h in self.functions])

    def violation(self, x):
        return float(max(0.0, np.max(self.values(x) - self.levels)))

    def contains(self, x, tol=FEASIBILITY_TOL):
        return self.violation(x) <= tol


@dataclass(frozen=True)
class ProjectionResult:
    """
    Closest point of a horoball intersection.

    ``residual`` is the larger of the constraint violation and the relative
    cone residual of ``log_point(x)`` against the active gradients;
    ``multipliers`` are the nonnegative cone coefficients per constraint.
    """

    point: ModelPoint
    iterations: int
    residual: float
    active: tuple = ()
    multipliers: tuple = ()


def _preflow(C, x, tol):
    """Flow along -sum of violated gradients until feasible."""
    y = x
    viol = C.violation(y)
    for _ in range(PREFLOW_STEPS):
        if viol <= tol:
            return y
        vals = C.values(y) - C.levels
        g = np.zeros(y.space.n)
        for h, v in zip(C.functions, vals):
            if v > 0.0:
                g += h.gradient(y).components
        nrm = np.linalg.norm(g)
        if nrm == 0.0:
            break
        step = max(viol, 1.0)
        while step > 1e-12:
            z = exp_map(TangentVector(y, -step * g / nrm))
            vz = C.violation(z)
            if vz < viol - 1e-12:
                break
            step *= 0.5
        else:
            break
        y, viol = z, vz
    if viol <= tol:
        return y
    raise InfeasibleError(
        f"Horoball intersection suspected empty: violation stuck at {viol:.3g}"
    )


def kkt_certificate(C, z, x, active_tol=1e-7):
    """
    Cone residual of ``log_z(x)`` against the gradients of the active
    constraints (outward normals), by nonnegative least squares.

    Returns ``(residual, active indices, multipliers)``.
    """
    v = log_map(z, x).components
    vals = C.values(z) - C.levels
    active = [i for i, val in enumerate(vals) if val >= -active_tol * max(1.0, abs(C.levels[i]))]
    if not np.any(v):
        return 0.0, tuple(active), tuple(0.0 for _ in active)
    if not active:
        return 1.0, (), ()
    g = np.array([C.functions[i].gradient(z).components for i in active]).T
    lam, rnorm = nnls(g, v)
    return rnorm / max(1.0, float(np.linalg.norm(v))), tuple(active), tuple(lam)


def _polish(C, z, x, active_tol=1e-6):
    """Active-set KKT solve in chart coordinates."""
    vals = C.values(z) - C.levels
    active = [i for i, val in enumerate(vals) if val >= -active_tol * max(1.0, abs(C.levels[i]))]
    if not active:
        return None
    space = z.space
    n = space.n
    g0 = np.array([C.functions[i].gradient(z).components for i in active]).T
    lam0, _ = nnls(g0, log_map(z, x).components)

    def equations(u):
        p = ModelPoint(space, u[:n])
        lam = u[n:]
        grad = sum(l * C.functions[i].gradient(p).components for l, i in zip(lam, active))
        eq1 = log_map(p, x).components - grad
        eq2 = [C.functions[i](p) - C.levels[i] for i in active]
        return np.concatenate([eq1, eq2])

    try:
        sol = root(equations, np.concatenate([z.coords, lam0]), method="hybr", tol=1e-14)
    except (GeometryError, FloatingPointError, ValueError):
        return None
    if not sol.success or not np.all(np.isfinite(sol.x)):
        return None
    if np.any(sol.x[n:] < -1e-10):
        return None
    return ModelPoint(space, sol.x[:n])


def project_to_intersection(
    C,
    x,
    tol=FEASIBILITY_TOL,
    kkt_tol=KKT_TOL,
    max_iter=INTERSECTION_MAX_ITER,
):
    """
    Closest-point projection ``p(b, x)`` to a horoball intersection.

    Cyclic single-horoball projections with Dykstra corrections kept as
    tangent vectors and transported along the iterates; the iterate is then
    polished by an active-set KKT solve and certified by nonnegative least
    squares.

    Raises
    ------
    InfeasibleError
        When the feasibility pre-flow stalls.
    ConvergenceError
        When no certified point is found within ``max_iter`` projections.
    """
    if x.space != C.space:
        raise GeometryError("Point and constraints live in different spaces")
    if C.contains(x, tol):
        return ProjectionResult(x, 0, 0.0)
    if C.witness is None:
        _preflow(C, x, tol)
    k = len(C.functions)
    z = x
    corrections = [TangentVector(x, np.zeros(x.space.n)) for _ in range(k)]
    iterations = 0
    best = (x, math.inf)
    polish_at = 1e-6
    while iterations < max_iter:
        start = z
        for i, h in enumerate(C.functions):
            q = corrections[i]
            if q.at is not z:
                q = parallel_transport(q, z)
            y = exp_map(q)
            z_new = project_to_horoball(h, C.levels[i], y)
            corrections[i] = log_map(z_new, y)
            z = z_new
            iterations += 1
        move = distance(start, z)
        if move < polish_at or iterations >= max_iter:
            candidate = _polish(C, z, x) or z
            resid, active, lam = kkt_certificate(C, candidate, x)
            resid = max(resid, C.violation(candidate))
            if resid < best[1]:
                best = (candidate, resid)
            if resid <= kkt_tol and C.violation(candidate) <= tol:
                return ProjectionResult(candidate, iterations, resid, active, lam)
            polish_at = max(move * 0.1, 1e-15)
            if move == 0.0:
                break
    raise ConvergenceError(
        f"Projection to horoball intersection did not converge in {iterations} projections",
        best=best[0],
        residual=best[1],
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def check_obtuse_comparison(C, x0, y, angle_tol=1e-6, slack=1e-8):
    """
    With ``x = p(x0)``: the angle at x between x0 and y is at least pi/2 and
    ``d(x, y) <= sqrt(d(x0, y)^2 - d(x0, x)^2)``.
    """
    name = "obtuse comparison"
    if not C.contains(y):
        return inapplicable(name, "y is not feasible")
    if C.contains(x0):
        return inapplicable(name, "x0 is feasible")
    x = project_to_intersection(C, x0).point
    lhs = distance(x, y)
    rhs_sq = distance(x0, y) ** 2 - distance(x0, x) ** 2
    rhs = math.sqrt(max(rhs_sq, 0.0))
    rep = Report(name, details={"projection": x, "lhs": lhs, "rhs": rhs})
    if lhs < 1e-12:
        rep.details["equality"] = True
        rep.details["angle"] = float("nan")
        rep.add(check(name, "inequality", lhs, rhs, slack))
        return rep
    angle = angle_between_points(x, x0, y)
    rep.details["angle"] = angle
    rep.details["equality"] = abs(lhs - rhs) <= slack
    rep.add(check(name, "angle", math.pi / 2 - angle, 0.0, angle_tol))
    rep.add(check(name, "inequality", lhs, rhs, slack))
    return rep


def monotone_levels_audit(C, a, b, x, slack=1e-8):
    """``d(x_a, x_ab) <= |a - b|_1`` for ``b <= a``, ``x_a = p(a, x)``, ``x_ab = p(b, x_a)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    name = "monotone levels"
    if np.any(b > a):
        return inapplicable(name, "levels are not ordered b <= a")
    xa = project_to_intersection(C.with_levels(a), x).point
    xab = project_to_intersection(C.with_levels(b), xa).point
    return Report(
        name,
        [check(name, "d(x_a,x_ab)", distance(xa, xab), float(np.sum(np.abs(a - b))), slack)],
    )


def contraction_audit(C, x, y, slack=1e-9):
    """``d(p(x), p(y)) <= d(x, y)``"""
    px = project_to_intersection(C, x).point
    py = project_to_intersection(C, y).point
    name = "projection contraction"
    return Report(name, [check(name, "d(p(x),p(y))", distance(px, py), distance(x, y), slack)])


@dataclass(frozen=True)
class FlowStep:
    radius: float
    point: ModelPoint
    residual: float


def sublevel_flow(f, x0, r_schedule, delta=0.01, tol=SPHERE_TOL, cauchy_tol=1e-3):
    """
    Sphere minimizers ``lambda_R`` along a radius schedule.

    The report carries the flow steps, the measured ratios
    ``d(lambda_R', lambda_R)/R`` against ``sqrt(2 delta + delta^2)`` for
    consecutive radii and for the explicit pairs ``(R, R(1+delta))``, the
    direction gaps at x0 and the accumulation boundary points.
    """
    rs = sorted(float(r) for r in r_schedule)
    if len(rs) < 2:
        raise ValueError("Input Error: the radius schedule needs at least two radii")
    name = "sublevel flow"
    rep = Report(name)
    steps = []
    start = None
    for r in rs:
        res = minimize_on_sphere(f, x0, r, tol=tol, start=start)
        steps.append(FlowStep(r, res.point, res.residual))
        start = res.point
    rep.details["steps"] = steps
    for s0, s1 in zip(steps, steps[1:]):
        d = s1.radius / s0.radius - 1.0
        ratio = distance(s0.point, s1.point) / s0.radius
        rep.add(check(name, f"R={s0.radius:g}->{s1.radius:g}", ratio, math.sqrt(2 * d + d * d), 1e-9))
    for s in steps:
        r1 = s.radius * (1.0 + delta)
        p1 = minimize_on_sphere(f, x0, r1, tol=tol, start=s.point).point
        ratio = distance(s.point, p1) / s.radius
        rep.add(
            check(name, f"delta={delta:g},R={s.radius:g}", ratio,
                  math.sqrt(2 * delta + delta * delta), 1e-9)
        )
    dirs = [log_map(x0, s.point) for s in steps]
    gaps = [vector_angle(a.components, b.components) for a, b in zip(dirs, dirs[1:])]
    rep.details["gaps"] = gaps
    limits = []
    for v in dirs[-3:]:
        if all(vector_angle(v.components, w.components) >= cauchy_tol for _, w in limits):
            limits.append((boundary_from_direction(v), v))
    rep.details["accumulation"] = [xi for xi, _ in limits]
    rep.details["limit"] = limits[-1][0]
    if gaps[-1] > cauchy_tol:
        warnings.warn(
            f"Direction gap {gaps[-1]:.3g} at R={rs[-1]:g} exceeds {cauchy_tol:g}",
            InconclusiveLimitWarning,
        )
        rep.add(note(name, "cauchy gap", gaps[-1], cauchy_tol, INCONCLUSIVE))
    else:
        rep.add(check(name, "cauchy gap", gaps[-1], cauchy_tol))
    return rep
