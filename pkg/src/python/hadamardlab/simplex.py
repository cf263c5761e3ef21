#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Busemann simplices: sphere minimizers of convex combinations of Busemann
functions, their limits at infinity, horospherical coordinates of the
Busemann cone and the audits that run on them.
"""

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .busemann import BusemannFunction, ConvexCombination, WordLengthOracle
from .convex import (
    SPHERE_TOL,
    HoroballIntersection,
    minimize_on_sphere,
    project_to_intersection,
)
from .errors import InconclusiveLimitWarning, PreconditionError
from .isometries import EuclideanMotion, HalfSpaceMotion
from .models import (
    TangentVector,
    angle_at,
    angle_between_points,
    boundary_from_direction,
    distance,
    exp_map,
    log_map,
    random_point,
    random_tangent,
    tits_distance,
    vector_angle,
)
from .parallel import parallel_map
from .reports import (
    DEGENERATE,
    INCONCLUSIVE,
    INFO,
    AuditRecord,
    Report,
    check,
    inapplicable,
    note,
)

DEFAULT_R_SCHEDULE = tuple(10.0 * 2**i for i in range(8))
DEFAULT_GRID = 8
INDEPENDENCE_TOL = 1e-8
INVERSE_TOL = 1e-7
INVARIANCE_TOL = 1e-8
DEGENERACY_RATIO = 0.02
COVER_MARGIN = 0.25
COVER_TOL = 1e-9
CORNER_RESOLUTION_CAP = 24


def barycentric_grid(k, m):
    """Points of the k-simplex whose coordinates are multiples of 1/m, as tuples."""
    if m < 1:
        raise ValueError(f"Input Error: grid resolution must be positive, got {m}")

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    return [tuple(c / m for c in comp) for comp in compositions(m, k + 1)]


def on_boundary(t):
    return len(t) > 1 and min(t) == 0.0


def t_key(t):
    return "(" + ",".join(f"{v:.6g}" for v in t) + ")"


@dataclass(frozen=True, eq=False)
class SimplexSpec:
    """
    Vertex data of a Busemann simplex.

    Attributes
    ----------
    vertices : tuple of BusemannFunction
        ``h_0, ..., h_k``, all normalized at ``basepoint``.
    basepoint : ModelPoint
    tits : numpy.ndarray
        Pairwise Tits distances of the vertex centers.
    alpha : float
        Margin ``pi/2 - max Td``; positive.
    """

    vertices: tuple
    basepoint: object
    tits: np.ndarray = None
    alpha: float = float("nan")

    def __post_init__(self):
        hs = tuple(
            h if h.basepoint is self.basepoint else BusemannFunction(h.center, self.basepoint)
            for h in self.vertices
        )
        if not hs:
            raise ValueError("Input Error: a simplex needs at least one vertex")
        k = len(hs)
        td = np.zeros((k, k))
        for i, j in combinations(range(k), 2):
            td[i, j] = td[j, i] = tits_distance(hs[i].center, hs[j].center)
        top = float(td.max()) if k > 1 else 0.0
        if top >= math.pi / 2:
            raise PreconditionError(
                f"Vertex Tits distance {top:.6g} is not below pi/2"
            )
        td.flags.writeable = False
        object.__setattr__(self, "vertices", hs)
        object.__setattr__(self, "tits", td)
        object.__setattr__(self, "alpha", math.pi / 2 - top)

    @classmethod
    def from_centers(cls, centers, basepoint):
        return cls(tuple(BusemannFunction(c, basepoint) for c in centers), basepoint)

    @property
    def k(self):
        return len(self.vertices) - 1

    @property
    def space(self):
        return self.basepoint.space

    def combination(self, t):
        return ConvexCombination.of(self.vertices, t)

    def rebased(self, basepoint):
        return SimplexSpec(tuple(h.rebased(basepoint) for h in self.vertices), basepoint)


@dataclass(frozen=True)
class HoroCoordinates:
    values: np.ndarray

    def __sub__(self, other):
        return self.values - other.values


def horo_coordinates(spec, x):
    """``b_i = h_i(x)``"""
    return HoroCoordinates(np.array([h(x) for h in spec.vertices]))


def horo_contraction_audit(spec, pairs):
    """``|h(x) - h(y)|_inf <= d(x, y)`` on the given point pairs."""
    name = "horo contraction"
    rep = Report(name)
    worst = -math.inf
    for x, y in pairs:
        diff = float(np.max(np.abs(horo_coordinates(spec, x) - horo_coordinates(spec, y))))
        excess = diff - distance(x, y)
        worst = max(worst, excess)
    rep.add(check(name, f"pairs={len(pairs)}", worst, 0.0, 1e-9))
    return rep


def sphere_point(spec, t, R, center=None, tol=SPHERE_TOL):
    """``sigma_R(t)``, minimizer of ``f_t`` on the sphere of radius R about the basepoint."""
    x0 = spec.basepoint if center is None else center
    return minimize_on_sphere(spec.combination(t), x0, R, tol=tol)


@dataclass
class SimplexApproximation:
    """
    ``sigma_R`` sampled on the barycentric grid of resolution m.

    ``samples`` maps grid tuples to SphereMinimum results; ``lipschitz`` is
    the largest ratio of the angle at the basepoint to the l2 distance of
    parameters over grid pairs.
    """

    spec: SimplexSpec
    radius: float
    grid: int
    samples: dict
    lipschitz: float
    report: Report

    def point(self, t):
        return self.samples[tuple(t)].point

    def boundary_samples(self):
        return {t: s for t, s in self.samples.items() if on_boundary(t)}


def lipschitz_constant(spec, samples):
    x0 = spec.basepoint
    ts = list(samples)
    worst = 0.0
    for a, b in combinations(ts, 2):
        dt = math.dist(a, b)
        ang = angle_between_points(x0, samples[a].point, samples[b].point)
        worst = max(worst, ang / dt)
    return worst


def approximate_simplex(spec, R, m=DEFAULT_GRID, tol=SPHERE_TOL):
    """
    Sample ``sigma_R`` on the grid and audit its Lipschitz constant against
    ``2 sqrt(k+1)``.
    """
    grid = barycentric_grid(spec.k, m)
    results = parallel_map(lambda t: sphere_point(spec, t, R, tol=tol), grid)
    samples = dict(zip(grid, results))
    lip = lipschitz_constant(spec, samples) if len(grid) > 1 else 0.0
    name = "lipschitz"
    rep = Report(name)
    rep.add(check(name, f"R={R:g},m={m}", lip, 2.0 * math.sqrt(spec.k + 1), 1e-6))
    worst = max(s.residual for s in results)
    rep.add(check("sphere certificate", f"R={R:g},m={m}", worst, tol))
    return SimplexApproximation(spec, float(R), m, samples, lip, rep)


@dataclass
class SimplexLimit:
    """Extrapolated boundary points of the Busemann simplex per grid point."""

    spec: SimplexSpec
    schedule: tuple
    limits: dict
    gaps: dict
    report: Report


def _direction_limit(spec, t, schedule, center=None):
    x0 = spec.basepoint if center is None else center
    pts = [sphere_point(spec, t, R, center=x0).point for R in schedule]
    dirs = [log_map(x0, p) for p in pts]
    gaps = [vector_angle(a.components, b.components) for a, b in zip(dirs, dirs[1:])]
    return boundary_from_direction(dirs[-1]), gaps, pts


def simplex_limit(
    spec,
    schedule=DEFAULT_R_SCHEDULE,
    m=DEFAULT_GRID,
    second_basepoint=None,
    cauchy_tol=1e-3,
):
    """
    Boundary points ``sigma(t)`` as the direction at the basepoint of
    ``sigma_R(t)`` at the largest radius, with Cauchy gaps, the diameter audit
    and, given a second basepoint y, the basepoint independence audit
    ``d(sigma_{R,x0}(t), sigma_{R,y}(t)) <= D + sqrt(2 D R + D^2)``.
    """
    schedule = tuple(sorted(float(r) for r in schedule))
    if len(schedule) < 3:
        raise ValueError("Input Error: the radius schedule needs at least 3 radii")
    grid = barycentric_grid(spec.k, m)
    name = "simplex limit"
    rep = Report(name)
    out = parallel_map(lambda t: _direction_limit(spec, t, schedule), grid)
    limits = {}
    gaps = {}
    inconclusive = []
    bound = math.pi / 2 - spec.alpha
    for t, (xi, g, _) in zip(grid, out):
        limits[t] = xi
        gaps[t] = g[-1] if g else 0.0
        if gaps[t] > cauchy_tol:
            inconclusive.append(t)
            rep.add(note(name, f"cauchy{t_key(t)}", gaps[t], cauchy_tol, INCONCLUSIVE))
        worst = max(tits_distance(xi, h.center) for h in spec.vertices)
        rep.add(check("diameter", t_key(t), worst, bound, 1e-3))
    if inconclusive:
        warnings.warn(
            f"{len(inconclusive)} grid points have Cauchy gaps above {cauchy_tol:g}",
            InconclusiveLimitWarning,
        )
    else:
        rep.add(check(name, "max cauchy gap", max(gaps.values()), cauchy_tol))
    if second_basepoint is not None:
        y = second_basepoint
        D = distance(spec.basepoint, y)
        other = parallel_map(lambda t: _direction_limit(spec, t, schedule, center=y), grid)
        for t, (xi_x, _, px), (xi_y, _, py) in zip(grid, out, other):
            for R, a, b in zip(schedule, px, py):
                rep.add(
                    check("basepoint independence", f"{t_key(t)},R={R:g}",
                          distance(a, b), D + math.sqrt(2 * D * R + D * D), 1e-9)
                )
            rep.add(
                check("limit agreement", t_key(t), angle_at(spec.basepoint, xi_x, xi_y),
                      cauchy_tol)
            )
    return SimplexLimit(spec, schedule, limits, gaps, rep)


def basepoint_independence_audit(
    spec, schedule=DEFAULT_R_SCHEDULE, pairs=50, seed=0, max_distance=5.0, t=None
):
    """
    ``d(sigma_{R,x}(t), sigma_{R,y}(t)) <= D + sqrt(2 D R + D^2)`` over random
    basepoint pairs with ``D = d(x, y) <= max_distance`` and every radius of
    the schedule, at the barycenter unless t is given. The angle at x between
    the two limit directions is noted per pair.
    """
    schedule = tuple(sorted(float(r) for r in schedule))
    if t is None:
        t = tuple(1.0 / (spec.k + 1) for _ in range(spec.k + 1))
    rng = np.random.default_rng(seed)
    bases = []
    for _ in range(pairs):
        x = random_point(spec.space, rng, 2.0)
        w = random_tangent(x, rng).components
        w = w / max(np.linalg.norm(w), 1e-300) * rng.uniform(0.0, max_distance)
        bases.append((x, exp_map(TangentVector(x, w))))

    def run(pair):
        x, y = pair
        xi_x, _, px = _direction_limit(spec, t, schedule, center=x)
        xi_y, _, py = _direction_limit(spec, t, schedule, center=y)
        D = distance(x, y)
        excess = max(distance(a, b) - (D + math.sqrt(2 * D * R + D * D)) for R, a, b in zip(schedule, px, py))
        return D, excess, angle_at(x, xi_x, xi_y)

    name = "basepoint independence"
    rep = Report(name)
    worst_d = worst_excess = worst_angle = 0.0
    for D, excess, ang in parallel_map(run, bases):
        worst_d = max(worst_d, D)
        worst_excess = max(worst_excess, excess)
        worst_angle = max(worst_angle, ang)
    rep.add(check(name, f"pairs={pairs}", worst_excess, 0.0, 1e-9))
    rep.add(check(name, "max D", worst_d, max_distance, 1e-9))
    rep.add(note(name, "limit angle", worst_angle))
    rep.details.update(pairs=pairs, max_D=worst_d, t=t)
    return rep


def gradient_independence(spec, x, tol=INDEPENDENCE_TOL):
    """Independent iff the smallest singular value of the gradient matrix exceeds tol."""
    g = np.array([h.gradient(x).components for h in spec.vertices])
    sv = np.linalg.svd(g, compute_uv=False)
    smallest = float(sv[-1]) if g.shape[0] <= g.shape[1] else 0.0
    return smallest > tol, smallest


def boundary_candidates(spec, t, schedule=DEFAULT_R_SCHEDULE, m=DEFAULT_GRID):
    """
    For each radius, the boundary grid point of ``sigma_R`` closest to
    ``sigma_R(t)``: list of ``(R, t', q)``.
    """
    boundary = [s for s in barycentric_grid(spec.k, m) if on_boundary(s)]
    out = []
    for R in schedule:
        target = sphere_point(spec, t, R).point
        best = None
        for s in boundary:
            q = sphere_point(spec, s, R).point
            d = distance(q, target)
            if best is None or d < best[0]:
                best = (d, s, q)
        if best is not None:
            out.append((float(R), best[1], best[2]))
    return out


def degeneracy_sequential_probe(spec, t, candidates, threshold=DEGENERACY_RATIO):
    """
    Ratios ``d(q_i, sigma_{R_i}(t))/R_i`` for candidates ``(R_i, t'_i, q_i)``.

    Verdict ``degeneracy-consistent`` when the last ratio is below
    ``threshold`` and at most half the first one (or all ratios vanish),
    ``non-degenerate-consistent`` otherwise. Heuristic at finite scale.
    """
    ratios = []
    for R, _, q in candidates:
        p = sphere_point(spec, t, R).point
        ratios.append((R, distance(q, p) / R))
    name = "degeneracy sequence"
    if not ratios:
        return Report(
            name,
            [note(name, t_key(t), float("nan"))],
            {"ratios": [], "verdict": "non-degenerate-consistent"},
            INFO,
        )
    first, last = ratios[0][1], ratios[-1][1]
    vanishing = all(r < 1e-9 for _, r in ratios)
    consistent = vanishing or (last < threshold and last <= 0.5 * first)
    verdict = "degeneracy-consistent" if consistent else "non-degenerate-consistent"
    rec = note(name, t_key(t), last, threshold, DEGENERATE if consistent else INFO)
    return Report(name, [rec], {"ratios": ratios, "verdict": verdict}, INFO)


def certify_nondegenerate(spec, schedule=DEFAULT_R_SCHEDULE, m=DEFAULT_GRID):
    """
    Finite-scale non-degeneracy: interior grid points where the gradients are
    independent at ``sigma_{R_max}(t)`` and the sequential degeneracy check against the
    boundary samples is not degeneracy-consistent.
    """
    grid = barycentric_grid(spec.k, m)
    interior = [t for t in grid if not on_boundary(t)]
    r_max = max(schedule)

    def certify(t):
        p = sphere_point(spec, t, r_max).point
        independent, sv = gradient_independence(spec, p)
        if not independent:
            return False, sv, "dependent gradients"
        if spec.k == 0:
            return True, sv, ""
        seq = degeneracy_sequential_probe(spec, t, boundary_candidates(spec, t, schedule, m))
        if seq["verdict"] == "degeneracy-consistent":
            return False, sv, "matched by boundary samples"
        return True, sv, ""

    results = parallel_map(certify, interior)
    certified = [t for t, (ok, _, _) in zip(interior, results) if ok]
    name = "non-degeneracy"
    records = [
        AuditRecord(name, t_key(t), sv, INDEPENDENCE_TOL, INFO if ok else DEGENERATE)
        for t, (ok, sv, _) in zip(interior, results)
    ]
    return Report(
        name,
        records,
        {"certified": certified, "reasons": {t: r for t, (_, _, r) in zip(interior, results)}},
        INFO if certified else DEGENERATE,
    )


def _sample_flags(spec, R, samples, boundary_tol):
    boundary = {t: s.point for t, s in samples.items() if on_boundary(t)}
    flags = {}
    for t, s in samples.items():
        if on_boundary(t):
            flags[t] = True
            continue
        if not gradient_independence(spec, s.point)[0]:
            flags[t] = True
            continue
        flags[t] = any(distance(s.point, q) < boundary_tol * R for q in boundary.values())
    return flags


def cone_injectivity_audit(spec, radii, m=DEFAULT_GRID, threshold=1e-6):
    """
    Non-degenerate samples of the Busemann cone must have pairwise distinct
    images; collisions among degenerate samples are counted separately.
    """
    samples = []
    for R in radii:
        approx = approximate_simplex(spec, R, m)
        flags = _sample_flags(spec, R, approx.samples, threshold)
        for t, s in approx.samples.items():
            samples.append((float(R), t, s.point, flags[t]))
    name = "cone injectivity"
    min_good = math.inf
    collisions = 0
    degenerate_collisions = 0
    for (R1, t1, p1, d1), (R2, t2, p2, d2) in combinations(samples, 2):
        d = distance(p1, p2)
        scale = threshold * min(R1, R2)
        if not d1 and not d2:
            min_good = min(min_good, d / min(R1, R2))
            collisions += d <= scale
        elif d <= scale:
            degenerate_collisions += 1
    n_good = sum(1 for s in samples if not s[3])
    rep = Report(
        name,
        details={
            "samples": len(samples),
            "nondegenerate": n_good,
            "collisions": collisions,
            "degenerate_collisions": degenerate_collisions,
            "all_degenerate": n_good == 0,
        },
    )
    rep.add(check(name, "collisions", collisions, 0))
    rep.add(note(name, "degenerate collisions", degenerate_collisions))
    if n_good > 1:
        rep.add(note(name, "min relative separation", min_good, threshold))
    return rep


@dataclass
class ConeImage:
    """
    Sampled ``W = h(Busemann cone)`` with interior labels.

    ``samples`` are dicts with keys ``R``, ``t``, ``b``, ``point`` and
    ``interior``; interior samples also carry ``star = (b, equations,
    extent)``, the convex hull of the images of their grid neighbors, and
    ``full_rank``, the Jacobian cross-check.
    """

    spec: SimplexSpec
    radii: tuple
    grid: int
    samples: list
    report: Report

    @property
    def r_max(self):
        return max(self.radii)

    @property
    def cell(self):
        """Grid scale of the sampling in coordinate units."""
        rs = sorted(self.radii)
        spacing = min(b - a for a, b in zip(rs, rs[1:])) if len(rs) > 1 else rs[0]
        return min(spacing, self.r_max / self.grid)

    def interior(self):
        return [s for s in self.samples if s["interior"]]

    @cached_property
    def _stars(self):
        stars = [s["star"] for s in self.interior()]
        if not stars:
            return None, stars, 0.0
        return cKDTree(np.array([c for c, _, _ in stars])), stars, max(e for _, _, e in stars)

    def covers(self, b, tol=COVER_TOL):
        """True when b lies in the neighbor hull of some interior sample."""
        tree, stars, extent = self._stars
        if tree is None:
            return False
        b = np.asarray(b, dtype=float)
        slack = tol * max(1.0, float(np.max(np.abs(b))))
        for i in tree.query_ball_point(b, extent * (1.0 + 1e-12)):
            center, eq, _ = stars[i]
            if np.all(eq[:, :-1] @ (b - center) + eq[:, -1] <= slack):
                return True
        return False


def _param_point(spec, R, t, tol):
    return horo_coordinates(spec, sphere_point(spec, t, R, tol=tol).point).values


def _full_rank(spec, R, t, tol):
    """Finite-difference Jacobian of ``(R, t) -> h(sigma_R(t))`` has full rank."""
    k = spec.k
    base = _param_point(spec, R, t, tol)
    cols = []
    eps_r = 1e-4 * R
    cols.append((_param_point(spec, R + eps_r, t, tol) - base) / eps_r)
    for j in range(1, k + 1):
        eps = 1e-4
        s = list(t)
        s[0] -= eps
        s[j] += eps
        cols.append((_param_point(spec, R, tuple(s), tol) - base) / eps)
    jac = np.array(cols).T
    sv = np.linalg.svd(jac, compute_uv=False)
    return bool(sv[-1] > 1e-6 * max(1.0, sv[0]))


def _grid_neighbors(grid, m):
    """Grid points whose integer coordinates differ from t by at most one, t included."""
    comps = [tuple(int(round(v * m)) for v in t) for t in grid]
    return {
        t: [u for c2, u in zip(comps, grid) if max(abs(a - b) for a, b in zip(c, c2)) <= 1]
        for c, t in zip(comps, grid)
    }


def _star(center, nbrs, margin):
    """
    Hull of the neighbor images as ``(center, equations, extent)`` when it
    contains the ball of radius ``margin`` times the nearest neighbor
    distance about center; None otherwise.
    """
    if len(nbrs) < center.size + 1:
        return None
    rel = nbrs - center
    dist = np.linalg.norm(rel, axis=1)
    if not np.any(dist > 0.0):
        return None
    h = float(np.min(dist[dist > 0.0]))
    if center.size == 1:
        eq = np.array([[1.0, -float(rel.max())], [-1.0, float(rel.min())]])
    else:
        try:
            eq = ConvexHull(rel).equations
        except QhullError:
            # flat neighborhood: W is lower dimensional here
            return None
    if float(np.min(-eq[:, -1])) <= margin * h:
        return None
    return np.array(center), eq, float(dist.max())


def _label_interior(samples, radii, grid, m, margin):
    """Interior labels from coverage by the neighbors on the radius and barycentric grids."""
    level = {R: i + 1 for i, R in enumerate(radii)}
    index = {(level[s["R"]], s["t"]): j for j, s in enumerate(samples) if s["R"] > 0.0}
    near = _grid_neighbors(grid, m)
    for j, s in enumerate(samples):
        if s["R"] == 0.0:
            continue
        lv = level[s["R"]]
        nbrs = []
        for l2 in (lv - 1, lv, lv + 1):
            if l2 == 0:
                nbrs.append(0)  # apex
                continue
            for u in near[s["t"]]:
                i = index.get((l2, u))
                if i is not None and i != j:
                    nbrs.append(i)
        star = _star(s["b"], np.array([samples[i]["b"] for i in nbrs]), margin) if nbrs else None
        s["interior"] = star is not None
        s["star"] = star


def cone_image_region(
    spec, radii, m=DEFAULT_GRID, inverse_samples=200, seed=0, tol=SPHERE_TOL, margin=COVER_MARGIN
):
    """
    Sample ``W`` over the radius range and grid, label interior samples and
    audit the inverse property ``h(p(b, x0)) = b``.

    A sample is interior when the images of its neighbors on the radius and
    barycentric grids surround it: their convex hull contains the ball about
    its image of ``margin`` times the nearest neighbor distance. Interior
    samples are cross-checked with the rank of the finite-difference
    Jacobian of ``(R, t) -> b``.
    """
    radii = tuple(sorted(float(r) for r in radii))
    grid = barycentric_grid(spec.k, m)
    items = [(R, t) for R in radii for t in grid]

    def sample(item):
        R, t = item
        p = sphere_point(spec, t, R, tol=tol).point
        return {"R": R, "t": t, "b": horo_coordinates(spec, p).values, "point": p,
                "interior": False, "star": None}

    samples = [{"R": 0.0, "t": grid[0], "b": np.zeros(spec.k + 1), "point": spec.basepoint,
                "interior": False, "star": None}]
    samples.extend(parallel_map(sample, items))
    _label_interior(samples, radii, grid, m, margin)
    inner = [s for s in samples if s["interior"]]
    ranks = parallel_map(lambda s: _full_rank(spec, s["R"], s["t"], tol), inner)
    for s, r in zip(inner, ranks):
        s["full_rank"] = r
    name = "cone inverse"
    rep = Report(name)
    rep.add(note("cone interior", f"samples={len(samples)}", len(inner)))
    rep.add(note("cone interior", "rank deficient", sum(not r for r in ranks)))
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(items), size=min(inverse_samples, len(items)), replace=False)
    constraints = HoroballIntersection(spec.vertices, np.zeros(spec.k + 1))
    worst = 0.0
    for i in sorted(picks):
        s = samples[1 + i]
        p = project_to_intersection(constraints.with_levels(s["b"]), spec.basepoint).point
        worst = max(worst, float(np.max(np.abs(horo_coordinates(spec, p).values - s["b"]))))
    rep.add(check(name, f"samples={len(picks)}", worst, INVERSE_TOL))
    return ConeImage(spec, radii, m, samples, rep)


def in_cone_image(spec, b, r_max=math.inf, tol=INVERSE_TOL):
    """Membership oracle for W: ``p(b, x0)`` realizes b and lies within r_max."""
    c = HoroballIntersection(spec.vertices, b)
    p = project_to_intersection(c, spec.basepoint).point
    err = float(np.max(np.abs(horo_coordinates(spec, p).values - np.asarray(b))))
    return err <= tol * max(1.0, float(np.max(np.abs(b)))) and distance(spec.basepoint, p) <= r_max


def _corner_points(a, L, resolution):
    k1 = len(a)
    # b = a - L s with s >= 0, |s|_1 <= 1
    pts = []
    for comp in barycentric_grid(k1, resolution):
        s = np.array(comp[:k1])
        pts.append(np.asarray(a) - L * s)
    return pts


@dataclass(frozen=True)
class CornerResult:
    """
    ``anchor`` is None when no corner was found; ``oracle`` is the fraction
    of corner vertices confirmed by :func:`in_cone_image`.
    """

    anchor: object
    scale: float
    cells: float
    oracle: float = float("nan")


def _oracle_fraction(image, a, scale):
    vertices = _corner_points(a, scale, 1)
    hits = sum(in_cone_image(image.spec, b, image.r_max * (1.0 + 1e-9)) for b in vertices)
    return hits / len(vertices)


def find_large_corner(image, L=None, anchors=5, resolution=3, oracle=True):
    """
    Search the sampled W for a corner ``{b <= a, |b - a|_1 <= L}`` covered
    by the samples.

    A corner is covered when every point of its barycentric grid, at a
    spacing of about one grid cell, lies in the neighbor hull of an interior
    sample. With L given, returns the first anchor carrying a corner of that
    scale (``anchor`` is None if there is none); otherwise doubles the scale
    from one grid cell until the corner test fails and reports the largest
    achieved scale. The corner vertices found are checked against the
    projection oracle.
    """
    spec = image.spec
    cands = image.interior()
    k1 = spec.k + 1
    center = np.full(k1, 1.0 / k1)
    cands.sort(key=lambda s: (float(np.linalg.norm(np.array(s["t"]) - center)),
                              abs(s["R"] - image.r_max / 2)))
    cands = cands[:anchors]
    cell = image.cell

    def covered(a, scale):
        n = min(CORNER_RESOLUTION_CAP, max(resolution, math.ceil(scale / cell)))
        return all(image.covers(b) for b in _corner_points(a, scale, n))

    def result(a, scale):
        frac = _oracle_fraction(image, a, scale) if oracle else float("nan")
        return CornerResult(a, float(scale), scale / cell, frac)

    if L is not None:
        for s in cands:
            if covered(s["b"], L):
                return result(s["b"], L)
        return CornerResult(None, 0.0, 0.0)
    best_anchor, best_scale = None, 0.0
    for s in cands:
        scale = cell
        achieved = 0.0
        while scale <= 4 * image.r_max and covered(s["b"], scale):
            achieved = scale
            scale *= 2.0
        if achieved > best_scale:
            best_anchor, best_scale = s["b"], achieved
    if best_anchor is None:
        return CornerResult(None, 0.0, 0.0)
    return result(best_anchor, best_scale)


def invariance_defect(functions, group, points):
    """``max |h(g x) - h(x)|`` over functions, group elements and points."""
    worst = 0.0
    for g in group:
        for x in points:
            gx = g.apply(x)
            for h in functions:
                worst = max(worst, abs(h(gx) - h(x)))
    return worst


def error_bound_audit(spec, b, group, x, orbit_radius=3, samples=8, seed=0):
    """
    ``|h(p(b, x)) - b|_inf <= d(x, A x0)`` for b in W, the orbit taken over
    the word ball of radius ``orbit_radius`` in the generators of A.
    """
    name = "error bound"
    rng = np.random.default_rng(seed)
    checkpoints = [spec.basepoint, x] + [random_point(spec.space, rng, 2.0) for _ in range(samples)]
    defect = invariance_defect(spec.vertices, group, checkpoints)
    if defect > INVARIANCE_TOL:
        return inapplicable(name, "group does not preserve the vertex horospheres", defect=defect)
    c = HoroballIntersection(spec.vertices, b)
    p = project_to_intersection(c, x).point
    err = float(np.max(np.abs(horo_coordinates(spec, p).values - np.asarray(b))))
    oracle = WordLengthOracle(group, orbit_radius)
    orbit_dist = min(distance(x, e.element.apply(spec.basepoint)) for e in oracle.entries())
    return Report(
        name,
        [check(name, "|h(p(b,x))-b|", err, orbit_dist, 1e-6)],
        {"invariance_defect": defect, "orbit_distance": orbit_dist},
    )


def root_lemma_audit(spec, a, b, x):
    """``d(p(a,x), p(b,x)) <= sqrt(2 d(x, p(a,x)) |a-b|_1 + |a-b|_1^2)`` for ``b <= a``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    name = "root lemma"
    if np.any(b > a):
        return inapplicable(name, "levels are not ordered b <= a")
    c = HoroballIntersection(spec.vertices, a)
    pa = project_to_intersection(c, x).point
    pb = project_to_intersection(c.with_levels(b), x).point
    l1 = float(np.sum(a - b))
    bound = math.sqrt(2.0 * distance(x, pa) * l1 + l1 * l1)
    return Report(name, [check(name, "d(p(a,x),p(b,x))", distance(pa, pb), bound, 1e-6)])


class LimitBusemann:
    """
    Limit Busemann function at ``sigma(t)`` rebuilt from sublevel sets:
    ``h(x) = d(x, {f_t <= s}) - d(x0, {f_t <= s})`` with ``s = f_t(sigma_R(t))``
    at the largest radius of the schedule.
    """

    def __init__(self, spec, t, schedule=DEFAULT_R_SCHEDULE, tol=SPHERE_TOL):
        self.spec = spec
        self.t = tuple(t)
        self.f = spec.combination(self.t)
        self.tol = tol
        self.levels = []
        for R in sorted(schedule):
            s = sphere_point(spec, self.t, R, tol=tol)
            self.levels.append((float(R), self.f(s.point)))

    def sublevel_distance(self, x, R, s):
        if self.f(x) <= s:
            return 0.0
        x0 = self.spec.basepoint
        d0 = distance(x, x0)

        def excess(rho):
            return minimize_on_sphere(self.f, x, rho, tol=self.tol).value - s

        lo = max(R - d0, 1e-12)
        hi = R + d0 + 1e-9
        flo, fhi = excess(lo), excess(hi)
        if flo <= 0.0:
            return lo
        if fhi >= 0.0:
            return hi
        return brentq(excess, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)

    def at_scale(self, x, i=-1):
        R, s = self.levels[i]
        return self.sublevel_distance(x, R, s) - R

    def __call__(self, x):
        return self.at_scale(x)


def limit_busemann(spec, t, schedule=DEFAULT_R_SCHEDULE):
    return LimitBusemann(spec, t, schedule)


def preserved_horosphere_audit(spec, t, group, points, schedule=DEFAULT_R_SCHEDULE, tol=1e-5):
    """``|h(g x) - h(x)|`` for the rebuilt limit Busemann function at ``sigma(t)``."""
    h = limit_busemann(spec, t, schedule)
    name = "preserved horosphere"
    worst = 0.0
    for g in group:
        for x in points:
            worst = max(worst, abs(h(g.apply(x)) - h(x)))
    return Report(name, [check(name, t_key(t), worst, tol)], {"function": h})


def translation_rank(group):
    """Rank of the translation-parameter matrix of the generators, or None."""
    rows = []
    for g in group:
        row = []
        for mtn in g.motions:
            if isinstance(mtn, EuclideanMotion):
                if not np.allclose(mtn.rotation, np.eye(mtn.n), atol=1e-12):
                    return None
                row.extend(mtn.translation)
            elif isinstance(mtn, HalfSpaceMotion):
                if not np.allclose(mtn.rotation, np.eye(mtn.n - 1), atol=1e-12):
                    return None
                row.extend([mtn.log_scale, *mtn.shift])
            else:
                return None
        rows.append(row)
    if not rows:
        return 0
    return int(np.linalg.matrix_rank(np.array(rows), tol=1e-9))


def dimension_bound_assert(spec, group, certification=None, samples=8, seed=0):
    """
    ``n >= k + 1 + r`` for an abelian group of rank r preserving every vertex
    horosphere, given a non-degenerate certification of the simplex.
    """
    name = "dimension bound"
    rng = np.random.default_rng(seed)
    checkpoints = [spec.basepoint] + [random_point(spec.space, rng, 2.0) for _ in range(samples)]
    defect = invariance_defect(spec.vertices, group, checkpoints)
    if defect > INVARIANCE_TOL:
        return inapplicable(name, "group does not preserve the vertex horospheres", defect=defect)
    if certification is None:
        certification = certify_nondegenerate(spec, DEFAULT_R_SCHEDULE[:4], 4)
    if not certification["certified"]:
        return inapplicable(name, "simplex not certified non-degenerate")
    r = translation_rank(group)
    if r is None:
        return inapplicable(name, "generators are not pure translations")
    n = spec.space.n
    need = spec.k + 1 + r
    return Report(
        name,
        [check(name, f"k={spec.k},r={r}", need, n)],
        {"n": n, "k": spec.k, "rank": r, "equality": need == n},
    )
