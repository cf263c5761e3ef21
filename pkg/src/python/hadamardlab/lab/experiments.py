#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Batch experiments over the scenario catalog.

Every experiment appends audit rows to a :class:`RowSink`; a step that
raises becomes a failed row instead of aborting the run. Rows are sorted by
``(scenario, audit, key)`` before they are written, floats with 17
significant digits.
"""

import math
import os
import time
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
import pandas as pd
from quantiphy import Quantity

from ..busemann import (
    WeightedDisplacementSeries,
    WordLengthOracle,
    combination_gradient,
    displacement,
    inf_displacement,
    series_infimum,
    unit_rate_defect,
    weighted_series,
)
from ..complexes import (
    AbelianLattice,
    build_class_complex,
    center_dimension,
    center_of,
    half_dimension_report,
    saturation,
    virtual_class_of,
    zeta_map,
)
from ..convex import (
    HoroballIntersection,
    check_obtuse_comparison,
    contraction_audit,
    monotone_levels_audit,
    project_to_horoball,
    project_to_intersection,
    sublevel_flow,
)
from ..dynamics import (
    HYPERBOLIC_KIND,
    INVARIANT_TOL,
    PARABOLIC,
    FiniteBoundarySet,
    center_of_finite_set,
    class_center_of_mass,
    classify,
    divergence_monotonicity_check,
    horosphere_invariance_check,
    km_tracking,
    radius_function,
)
from ..errors import HadamardLabError, LabInputError, PreconditionError, SamplingWarning
from ..isometries import boost, product_isometry, rotation, translation
from ..models import (
    EUCLIDEAN,
    BoundaryPoint,
    angle_at,
    distance,
    geodesic_ray,
    random_boundary_point,
    random_point,
    tits_distance,
)
from ..reports import (
    FAIL,
    SOFT_VERDICTS,
    AuditRecord,
    Report,
    check,
    note,
)
from ..simplex import (
    ConeImage,
    approximate_simplex,
    basepoint_independence_audit,
    boundary_candidates,
    certify_nondegenerate,
    cone_image_region,
    cone_injectivity_audit,
    degeneracy_sequential_probe,
    dimension_bound_assert,
    error_bound_audit,
    find_large_corner,
    gradient_independence,
    horo_contraction_audit,
    horo_coordinates,
    preserved_horosphere_audit,
    root_lemma_audit,
    simplex_limit,
    sphere_point,
    t_key,
)
from .scenarios import CATALOG, get_scenario, list_scenarios

ROW_COLUMNS = ["scenario", "audit", "key", "measured", "bound", "verdict"]
FLOAT_FORMAT = "%.17g"

# every operation the verify suite must reach, by module
OPERATIONS = {
    "hadamard-models": ("distance", "geodesic_ray", "angle_at", "tits_distance"),
    "busemann-core": (
        "busemann_value",
        "busemann_gradient",
        "combination_gradient",
        "displacement",
        "inf_displacement",
        "weighted_series",
    ),
    "convex-geometry": (
        "minimize_on_sphere",
        "project_to_horoball",
        "project_to_intersection",
        "check_obtuse_comparison",
        "sublevel_flow",
    ),
    "busemann-simplex": (
        "approximate_simplex",
        "simplex_limit",
        "basepoint_independence_audit",
        "horo_coordinates",
        "gradient_independence",
        "cone_injectivity_audit",
        "cone_image_region",
        "find_large_corner",
        "error_bound_audit",
        "root_lemma_audit",
        "degeneracy_sequential_probe",
        "dimension_bound_assert",
    ),
    "isometry-dynamics": (
        "classify",
        "km_tracking",
        "center_of_finite_set",
        "class_center_of_mass",
        "horosphere_invariance_check",
        "divergence_monotonicity_check",
    ),
    "abelian-complex": (
        "center_of",
        "zeta_map",
        "virtual_class_of",
        "build_class_complex",
        "half_dimension_report",
    ),
    "lab-cli": ("run", "list_scenarios"),
}

GUARDED = (HadamardLabError, ValueError, ArithmeticError, np.linalg.LinAlgError)


@dataclass
class RunRecord:
    """
    Outcome of one run.

    ``outputs`` lists the written files; ``verdicts`` counts rows per
    verdict. The timestamp appears here and in the summary only.
    """

    config_hash: str
    timestamp: str
    outputs: list
    verdicts: dict
    passed: bool
    exit_code: int


class RowSink:
    """Audit rows and sample rows of one run, with the operation coverage."""

    def __init__(self, verbose=False):
        self.rows = []
        self.samples = []
        self.covered = {}
        self.verbose = verbose

    def mark(self, scenario, *operations):
        for op in operations:
            self.covered.setdefault(op, set()).add(scenario)

    def add(self, scenario, item):
        if isinstance(item, Report):
            for r in item.records:
                self.rows.append(r.as_row(scenario))
        elif isinstance(item, AuditRecord):
            self.rows.append(item.as_row(scenario))
        else:
            for r in item:
                self.add(scenario, r)

    def guarded(self, scenario, audit, func, *args, **kwargs):
        """Call func; an exception becomes a failed row and None is returned."""
        if self.verbose:
            print(f"{scenario}: {audit}")
        try:
            return func(*args, **kwargs)
        except GUARDED as e:
            self.add(scenario, AuditRecord(audit, type(e).__name__, float("nan"), float("nan"), FAIL))
            if self.verbose:
                print(f"{scenario}: {audit} failed: {e}")
            return None

    def frame(self):
        df = pd.DataFrame(self.rows, columns=ROW_COLUMNS)
        return df.sort_values(["scenario", "audit", "key"], kind="mergesort").reset_index(drop=True)

    def verdicts(self):
        out = {}
        for r in self.rows:
            out[r["verdict"]] = out.get(r["verdict"], 0) + 1
        return dict(sorted(out.items()))

    @property
    def passed(self):
        return all(r["verdict"] in SOFT_VERDICTS for r in self.rows)


@dataclass
class Context:
    scenario: str
    setup: object
    config: object
    sink: RowSink
    rng: np.random.Generator = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rng is None:
            self.rng = np.random.default_rng(self.config.seed)

    def add(self, item):
        self.sink.add(self.scenario, item)

    def mark(self, *operations):
        self.sink.mark(self.scenario, *operations)

    def guarded(self, audit, func, *args, **kwargs):
        return self.sink.guarded(self.scenario, audit, func, *args, **kwargs)


def _center_t(k):
    return tuple([1.0 / (k + 1)] * (k + 1))


def _flat_closed_form(spec, t, R):
    """Euclidean sphere minimizer: basepoint plus R times the normalized combined direction."""
    w = sum(ti * h.center.directions[0] for ti, h in zip(t, spec.vertices))
    return spec.basepoint.coords + R * w / np.linalg.norm(w)


# ---------------------------------------------------------------------------
# simplex
# ---------------------------------------------------------------------------


def _approximations(ctx):
    spec = ctx.setup.spec
    cfg = ctx.config
    flat = spec.space.kind == EUCLIDEAN
    worst_oracle = 0.0
    for R in cfg.r_schedule:
        approx = ctx.guarded("lipschitz", approximate_simplex, spec, R, cfg.grid, cfg.sphere_tol)
        if approx is None:
            continue
        ctx.add(approx.report)
        for t, s in approx.samples.items():
            row = {
                "scenario": ctx.scenario,
                "R": float(R),
                "t": t_key(t),
                "lipschitz": approx.lipschitz,
                "residual": s.residual,
            }
            for i, v in enumerate(s.point.coords):
                row[f"x{i}"] = float(v)
            for i, v in enumerate(horo_coordinates(spec, s.point).values):
                row[f"b{i}"] = float(v)
            if flat:
                err = float(np.linalg.norm(s.point.coords - _flat_closed_form(spec, t, R))) / R
                row["oracle_error"] = err
                worst_oracle = max(worst_oracle, err)
            ctx.sink.samples.append(row)
            grad = combination_gradient(spec.combination(t), s.point)
            if grad.angle_condition:
                key = f"R={R:g},{t_key(t)}"
                ctx.add(check("gradient norm lower", key, grad.lower_bound - grad.norm, 0.0, 1e-9))
                ctx.add(check("gradient norm upper", key, grad.norm, 1.0, 1e-9))
        ctx.extra.setdefault("approximations", []).append(approx)
    if flat:
        ctx.add(check("flat oracle", f"m={cfg.grid}", worst_oracle, 1e-9))
    ctx.mark("approximate_simplex", "minimize_on_sphere", "horo_coordinates", "combination_gradient")


def _limits(ctx):
    spec = ctx.setup.spec
    cfg = ctx.config
    lim = ctx.guarded(
        "simplex limit",
        simplex_limit,
        spec,
        cfg.r_schedule,
        cfg.grid,
        second_basepoint=ctx.setup.second_basepoint,
    )
    if lim is not None:
        ctx.add(lim.report)
    ctx.mark("simplex_limit")
    bp = ctx.guarded(
        "basepoint independence", basepoint_independence_audit, spec, cfg.r_schedule, 50, cfg.seed, 5.0
    )
    if bp is not None:
        ctx.add(bp)
    ctx.mark("basepoint_independence_audit")
    approxs = ctx.extra.get("approximations", [])
    if approxs:
        pts = [s.point for s in approxs[-1].samples.values()]
        pairs = list(zip(pts, pts[1:])) + [(spec.basepoint, p) for p in pts[:4]]
        ctx.add(horo_contraction_audit(spec, pairs))


def _degeneracy(ctx):
    spec = ctx.setup.spec
    cfg = ctx.config
    t0 = _center_t(spec.k)
    p = sphere_point(spec, t0, max(cfg.r_schedule)).point
    independent, sv = gradient_independence(spec, p)
    ctx.add(note("gradient independence", t_key(t0), sv, float(independent)))
    ctx.mark("gradient_independence")
    cert = ctx.guarded("non-degeneracy", certify_nondegenerate, spec, cfg.r_schedule, cfg.grid)
    if cert is not None:
        ctx.add(cert)
        ctx.extra["certification"] = cert
    control = ctx.setup.control
    if control is not None:
        t = _center_t(control.k)
        cands = boundary_candidates(control, t, cfg.r_schedule[:3], cfg.grid)
        seq = degeneracy_sequential_probe(control, t, cands)
        ctx.add(seq)
        flagged = seq["verdict"] == "degeneracy-consistent"
        ctx.add(check("control degeneracy", t_key(t), 0.0 if flagged else 1.0, 0.0))
        ctx.mark("degeneracy_sequential_probe")
    elif spec.k > 0:
        cands = boundary_candidates(spec, t0, cfg.r_schedule, cfg.grid)
        ctx.add(degeneracy_sequential_probe(spec, t0, cands))
        ctx.mark("degeneracy_sequential_probe")


def _sub_image(image, r_max):
    radii = tuple(r for r in image.radii if r <= r_max)
    samples = [dict(s, interior=s["interior"] and s["R"] < r_max) for s in image.samples if s["R"] <= r_max]
    return ConeImage(image.spec, radii, image.grid, samples, image.report)


def _cone(ctx):
    spec = ctx.setup.spec
    cfg = ctx.config
    radii = cfg.r_schedule
    inj = ctx.guarded("cone injectivity", cone_injectivity_audit, spec, radii[:3], cfg.grid)
    if inj is not None:
        ctx.add(inj)
    ctx.mark("cone_injectivity_audit")
    image = ctx.guarded(
        "cone inverse", cone_image_region, spec, radii, cfg.grid, cfg.samples, cfg.seed, cfg.sphere_tol
    )
    ctx.mark("cone_image_region")
    if image is None:
        return
    ctx.add(image.report)
    scales = []
    for r_max in radii[1:]:
        corner = find_large_corner(_sub_image(image, r_max))
        ctx.add(note("corner scale", f"r_max={r_max:g}", corner.scale, corner.cells))
        if corner.anchor is not None:
            ctx.add(note("corner oracle", f"r_max={r_max:g}", corner.oracle, 1.0))
        if scales:
            ctx.add(check("corner growth", f"r_max={r_max:g}", scales[-1] - corner.scale, 0.0, 1e-12))
        scales.append(corner.scale)
    if len(scales) > 1:
        ctx.add(check("corner growth", f"doublings={len(scales) - 1}", scales[0] - scales[-1], 0.0, -1e-12))
    ctx.mark("find_large_corner")
    control = ctx.setup.control
    if control is not None:
        small = ctx.guarded(
            "control cone", cone_image_region, control, radii[:3], cfg.grid, min(cfg.samples, 8), cfg.seed
        )
        if small is not None:
            corner = find_large_corner(small)
            ctx.add(check("control corner", "cells", corner.cells, 10.0))


def _invariance(ctx):
    spec = ctx.setup.spec
    cfg = ctx.config
    group = ctx.setup.group
    if not group:
        return
    dim = ctx.guarded(
        "dimension bound",
        dimension_bound_assert,
        spec,
        group,
        ctx.extra.get("certification"),
        8,
        cfg.seed,
    )
    if dim is not None:
        ctx.add(dim)
        if dim.details.get("equality") is not None:
            ctx.add(note("dimension bound", "equality", float(dim["equality"]), float(dim["n"])))
    ctx.mark("dimension_bound_assert")
    points = [spec.basepoint]
    if ctx.setup.second_basepoint is not None:
        points.append(ctx.setup.second_basepoint)
    rep = ctx.guarded(
        "preserved horosphere",
        preserved_horosphere_audit,
        spec,
        _center_t(spec.k),
        group,
        points,
        cfg.r_schedule[:4],
    )
    if rep is not None:
        ctx.add(rep)
    flow = ctx.guarded(
        "sublevel flow",
        sublevel_flow,
        spec.combination(_center_t(spec.k)),
        spec.basepoint,
        cfg.r_schedule,
        tol=cfg.sphere_tol,
    )
    if flow is not None:
        ctx.add(flow)
    ctx.mark("sublevel_flow")


def simplex_experiment(ctx):
    """Approximations, limits, degeneracy, cone image and invariance audits of the scenario simplex."""
    _approximations(ctx)
    _limits(ctx)
    _degeneracy(ctx)
    _cone(ctx)
    _invariance(ctx)


# ---------------------------------------------------------------------------
# projection audits
# ---------------------------------------------------------------------------


def projection_experiment(ctx):
    """Closest-point projection lemmas on horoball intersections of the scenario simplex."""
    spec = ctx.setup.spec
    cfg = ctx.config
    rng = ctx.rng
    space = spec.space
    R = cfg.r_schedule[min(1, len(cfg.r_schedule) - 1)]
    y = sphere_point(spec, _center_t(spec.k), R).point
    b_w = horo_coordinates(spec, y).values
    C = HoroballIntersection(spec.vertices, b_w + 0.5)
    ctx.mark("horo_coordinates", "minimize_on_sphere")

    worst_level = worst_move = 0.0
    for _ in range(cfg.samples):
        x = random_point(space, rng, 3.0)
        for h, level in zip(C.functions, C.levels):
            p = project_to_horoball(h, level, x)
            worst_level = max(worst_level, h(p) - level)
            worst_move = max(worst_move, abs(distance(x, p) - max(0.0, h(x) - level)))
    ctx.add(check("horoball projection", "level", worst_level, 0.0, 1e-9))
    ctx.add(check("horoball projection", "distance", worst_move, 0.0, 1e-9))
    ctx.mark("project_to_horoball", "busemann_value")

    res = ctx.guarded("projection kkt", project_to_intersection, C, spec.basepoint, kkt_tol=cfg.kkt_tol)
    if res is not None:
        ctx.add(check("projection kkt", "basepoint", res.residual, cfg.kkt_tol))
    ctx.mark("project_to_intersection")

    for i in range(cfg.samples):
        x0 = random_point(space, rng, 3.0)
        z = random_point(space, rng, 3.0)
        inside = ctx.guarded("obtuse comparison", project_to_intersection, C, z)
        if inside is not None:
            rep = ctx.guarded("obtuse comparison", check_obtuse_comparison, C, x0, inside.point)
            if rep is not None:
                ctx.add(rep)
        a = C.levels
        b = a - rng.uniform(0.0, 2.0, size=a.shape[0])
        for audit, func, args in (
            ("monotone levels", monotone_levels_audit, (C, a, b, x0)),
            ("projection contraction", contraction_audit, (C, x0, z)),
            ("root lemma", root_lemma_audit, (spec, a, b, x0)),
        ):
            rep = ctx.guarded(audit, func, *args)
            if rep is not None:
                ctx.add(rep)
    ctx.mark("check_obtuse_comparison", "root_lemma_audit")

    if ctx.setup.group:
        for j in range(min(cfg.samples, 8)):
            x = random_point(space, rng, 2.0)
            rep = ctx.guarded(
                "error bound", error_bound_audit, spec, b_w, ctx.setup.group, x, 3, 8, cfg.seed + j
            )
            if rep is not None:
                ctx.add(rep)
        ctx.mark("error_bound_audit")


# ---------------------------------------------------------------------------
# tracking
# ---------------------------------------------------------------------------


def _kind_check(ctx, g, expected):
    c = classify(g)
    ctx.add(note("classify", f"{g.name}:{c.kind}", c.translation_length))
    ctx.add(check("classify", f"{g.name} is {expected}", 0.0 if c.kind == expected else 1.0, 0.0))
    ctx.mark("classify")


def tracking_experiment(ctx):
    """Orbit tracking for the mixed, pure axis and pure parabolic isometries."""
    setup = ctx.setup
    cfg = ctx.config
    y = setup.space.origin()
    g = setup.tracked
    ctx.guarded("classify", _kind_check, ctx, g, HYPERBOLIC_KIND)
    ctx.guarded("classify", _kind_check, ctx, setup.pure_axis, HYPERBOLIC_KIND)
    ctx.guarded("classify", _kind_check, ctx, setup.pure_parabolic, PARABOLIC)

    A = g.translation_length()
    est = ctx.guarded("inf displacement", inf_displacement, g, y, 64)
    if est is not None:
        ctx.add(check("inf displacement", "A<=lower", A, est.lower, 1e-9))
        ctx.add(check("inf displacement", "lower<=upper", est.lower, est.upper, 1e-12))
        ctx.add(check("inf displacement", "A<=d_g(y)", A, displacement(g, y), 1e-9))
    ctx.mark("inf_displacement", "displacement")

    res = ctx.guarded("km tracking", km_tracking, g, y, cfg.k_max)
    if res is not None:
        ctx.add(res.report)
        ctx.add(check("km final ratio", f"{g.name},k={cfg.k_max}", res.ratios[-1][1], setup.km_bound))
    axis = ctx.guarded("km tracking", km_tracking, setup.pure_axis, y, cfg.k_max)
    if axis is not None:
        ctx.add(check("km pure axis", setup.pure_axis.name, max(r for _, r in axis.ratios), 1e-9))
    try:
        km_tracking(setup.pure_parabolic, y, cfg.k_max)
        rejected = False
    except PreconditionError:
        rejected = True
    ctx.add(check("km precondition", f"{setup.pure_parabolic.name} rejected", 0.0 if rejected else 1.0, 0.0))
    ctx.mark("km_tracking")


# ---------------------------------------------------------------------------
# centers of mass
# ---------------------------------------------------------------------------


def _theta_oracle(K, step=1e-3):
    """Grid minimum of the radius function over joins sharing the factor endpoints of K."""
    space = K[0].space
    dirs = [next((p.directions[i] for p in K if p.directions[i] is not None), None) for i in range(2)]
    best = math.inf
    for th in np.arange(0.0, math.pi / 2 + step, step):
        th = min(th, math.pi / 2)
        w = np.array([math.cos(th), math.sin(th)])
        w[np.abs(w) < 1e-15] = 0.0
        use = tuple(d if wi > 0.0 else None for d, wi in zip(dirs, w))
        if any(wi > 0.0 and d is None for d, wi in zip(use, w)):
            continue
        best = min(best, radius_function(K, BoundaryPoint(space, w, use)))
    return best


def _random_join_sets(space, rng, count):
    """Joins sharing one random endpoint per factor at random angles; each set is admissible."""
    out = []
    for _ in range(count):
        dirs = random_boundary_point(space, rng).directions
        thetas = rng.uniform(0.0, math.pi / 2, size=int(rng.integers(2, 6)))
        out.append([BoundaryPoint(space, np.array([math.cos(t), math.sin(t)]), dirs) for t in thetas])
    return out


def _conjugator(space, rng):
    """Random rotation and boost per hyperbolic factor, rotation and translation per Euclidean one."""
    factors = []
    for f, _ in space.blocks:
        q, r = np.linalg.qr(rng.normal(size=(f.n, f.n)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0.0:
            q[:, 0] = -q[:, 0]
        if f.kind == EUCLIDEAN:
            factors.append(rotation(f, q).compose(translation(f, rng.normal(size=f.n))))
        else:
            factors.append(rotation(f, q).compose(boost(f, float(rng.uniform(-2.0, 2.0)))))
    return product_isometry(space, *factors, name="c")


def center_experiment(ctx):
    """Centers of mass at infinity and the horosphere audits of the scenario group."""
    setup = ctx.setup
    cfg = ctx.config
    spec = setup.spec
    cc = ctx.guarded(
        "class center", class_center_of_mass, setup.class_generators, setup.F_A, 10, cfg.seed
    )
    if cc is not None:
        ctx.add(cc.report)
        if setup.expected_theta is not None:
            ctx.add(check("class center theta", "symmetry", abs(cc.point.theta - setup.expected_theta), 1e-6))
        doubled = [g.power(2) for g in setup.class_generators]
        cc2 = ctx.guarded("class center", class_center_of_mass, doubled, setup.F_A, 10, cfg.seed)
        if cc2 is not None:
            ctx.add(check("class center finite index", "A vs 2A", tits_distance(cc.point, cc2.point), 1e-4))
        c = _conjugator(setup.space, ctx.rng)
        conj = [g.conjugate(c) for g in setup.class_generators]
        moved = FiniteBoundarySet(setup.F_A.samples()).transform(c)
        cc3 = ctx.guarded("class center", class_center_of_mass, conj, moved, 10, cfg.seed)
        if cc3 is not None:
            ctx.add(check("class center equivariance", "conjugate",
                          tits_distance(cc3.point, c.apply_boundary(cc.point)), 1e-6))
    ctx.mark("class_center_of_mass")

    for i, K in enumerate(setup.center_sets):
        res = ctx.guarded("center", center_of_finite_set, K, 10, cfg.seed)
        if res is None:
            continue
        ctx.add(note("center", f"set{i}:radius", res.radius))
        if setup.space.n_factors == 2:
            ctx.add(check("center oracle", f"set{i}", abs(res.radius - _theta_oracle(K)), 1e-3))
    if setup.space is not None and setup.space.n_factors == 2:
        worst = 0.0
        disagree = 0
        sets = _random_join_sets(setup.space, ctx.rng, 50)
        for K in sets:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SamplingWarning)
                res = center_of_finite_set(K, 10, cfg.seed)
            worst = max(worst, abs(res.radius - _theta_oracle(K)))
            disagree += not res.agree
        ctx.add(check("center oracle", f"random sets={len(sets)}", worst, 1e-3))
        ctx.add(check("center restarts", f"random sets={len(sets)}", disagree, 0))
    ctx.mark("center_of_finite_set")

    for g, h in setup.pairs:
        rep = ctx.guarded(
            "horosphere invariance", horosphere_invariance_check, g, h, cfg.samples, cfg.seed
        )
        if rep is not None:
            ctx.add(rep)
            ctx.add(check("horosphere invariance", f"{g.name}", rep["drift"], INVARIANT_TOL))
    ctx.mark("horosphere_invariance_check")

    if setup.group and spec is not None:
        h = spec.vertices[0]
        eta = spec.vertices[-1].center
        rep = ctx.guarded("divergence", divergence_monotonicity_check, setup.group[0], h, eta)
        if rep is not None:
            ctx.add(rep)
        ctx.mark("divergence_monotonicity_check")


# ---------------------------------------------------------------------------
# abelian complexes
# ---------------------------------------------------------------------------


def _lattice_idempotence(ctx, count, D=6):
    rng = ctx.rng
    bad = 0
    for _ in range(count):
        r = int(rng.integers(1, D))
        rows = rng.integers(-6, 7, size=(r, D)) * rng.integers(1, 4, size=(r, 1))
        L = AbelianLattice.from_generators(rows, D)
        S = saturation(L)
        ok = saturation(S) == S and virtual_class_of(S) == virtual_class_of(L) and S.contains(L)
        bad += not ok
    ctx.add(check("virtual class idempotence", f"lattices={count}", bad, 0))


def complex_experiment(ctx):
    """Centers, zeta lattices, virtual classes and the class complex of the scenario chains."""
    inst = ctx.setup.instances
    cfg = ctx.config
    for name in sorted(inst.groups):
        g = inst.groups[name]
        z = ctx.guarded("center", center_of, g)
        if z is not None:
            ctx.add(check("center rank", name, abs(z.rank - center_dimension(g)), 0))
    ctx.mark("center_of")
    chains = inst.chain_groups()
    for chain in chains:
        key = "<".join(g.name for g in chain)
        A = ctx.guarded("zeta", zeta_map, chain)
        if A is None:
            continue
        ctx.add(note("zeta rank", key, A.rank))
        cls = virtual_class_of(A)
        ctx.add(check("virtual class", key, 0.0 if virtual_class_of(saturation(A)) == cls else 1.0, 0.0))
    ctx.mark("zeta_map", "virtual_class_of")
    ctx.guarded("virtual class idempotence", _lattice_idempotence, ctx, min(cfg.samples, 100))
    model = ctx.guarded("class complex", build_class_complex, chains, inst.ambient)
    ctx.mark("build_class_complex")
    if model is None:
        return
    ctx.add(model.report)
    ctx.add(half_dimension_report(model))
    ctx.mark("half_dimension_report")


# ---------------------------------------------------------------------------
# core audits (verify only)
# ---------------------------------------------------------------------------


def core_audits(ctx, samples):
    """Metric, ray, angle and Busemann identities on random points of the scenario space."""
    space = ctx.setup.space
    rng = ctx.rng
    tri = ray = ang = sym = unit = lip = rate = 0.0
    for _ in range(samples):
        x, y, z = (random_point(space, rng, 2.0) for _ in range(3))
        tri = max(tri, distance(x, z) - distance(x, y) - distance(y, z))
        xi, eta = random_boundary_point(space, rng), random_boundary_point(space, rng)
        t = float(rng.uniform(0.0, 20.0))
        ray = max(ray, abs(distance(x, geodesic_ray(x, xi, t)) - t) / max(1.0, t))
        ang = max(ang, angle_at(x, xi, eta) - tits_distance(xi, eta))
        sym = max(sym, abs(tits_distance(xi, eta) - tits_distance(eta, xi)))
        spec = ctx.setup.spec
        if spec is not None:
            h = spec.vertices[0]
            unit = max(unit, abs(h.gradient(x).norm() - 1.0))
            lip = max(lip, abs(h(x) - h(y)) - distance(x, y))
            rate = max(rate, unit_rate_defect(h, x, t))
    ctx.add(check("triangle inequality", f"samples={samples}", tri, 0.0, 1e-9))
    ctx.add(check("ray unit speed", f"samples={samples}", ray, 0.0, 1e-9))
    ctx.add(check("angle below tits", f"samples={samples}", ang, 0.0, 1e-9))
    ctx.add(check("tits symmetry", f"samples={samples}", sym, 0.0, 1e-12))
    ctx.mark("distance", "geodesic_ray", "angle_at", "tits_distance")
    if ctx.setup.spec is not None:
        ctx.add(check("busemann gradient", "unit norm", unit, 0.0, 1e-9))
        ctx.add(check("busemann value", "1-lipschitz", lip, 0.0, 1e-9))
        ctx.add(check("busemann value", "unit rate", rate, 0.0, 1e-9))
        ctx.mark("busemann_value", "busemann_gradient")
        # sphere minimizers seen from the basepoint stay on the sphere
        spec = ctx.setup.spec
        R = ctx.config.r_schedule[0]
        s = sphere_point(spec, _center_t(spec.k), R, tol=ctx.config.sphere_tol)
        ctx.add(check("sphere minimum", "certificate", s.residual, ctx.config.sphere_tol))
        ctx.add(check("sphere minimum", "radius", abs(distance(spec.basepoint, s.point) - R) / R, 0.0, 1e-9))
        ctx.mark("minimize_on_sphere")
    for g in ctx.setup.group:
        d = displacement(g, space.origin())
        ctx.add(check("displacement", f"{g.name}:|g|<=d_g", g.translation_length(), d, 1e-9))
        ctx.mark("displacement")


def series_audits(ctx):
    """Truncated weighted displacement series: value, tail and the infimum formula."""
    for label, generators, c, subgroup, r_cut in ctx.setup.series:
        x0 = ctx.setup.space.origin()
        val = ctx.guarded("weighted series", weighted_series, generators, c, subgroup, x0, r_cut)
        if val is None:
            continue
        series = WeightedDisplacementSeries(WordLengthOracle(generators, r_cut), c, subgroup, r_cut)
        formula = series.infimum_formula()
        ctx.add(check("weighted series", f"{label}:value>=formula", formula, val.value, 1e-9))
        best = ctx.guarded("series infimum", series_infimum, series, x0)
        if best is not None:
            ctx.add(
                check("series infimum", label, abs(best.value - formula), best.tail_bound, 1e-6)
            )
        ctx.mark("weighted_series")


EXPERIMENT_FUNCTIONS = {
    "simplex": simplex_experiment,
    "projection-audit": projection_experiment,
    "tracking": tracking_experiment,
    "center": center_experiment,
    "complex": complex_experiment,
}


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------


def _stem(path):
    root, _ = os.path.splitext(path)
    return root


def _write(df, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan")


def reduced(config):
    """Desk-scale parameters of the verify suite."""
    return config.replace(
        r_schedule=tuple(config.r_schedule[:6]),
        grid=min(config.grid, 4),
        samples=min(config.samples, 12),
    )


def _run_scenario(scenario, experiments, config, sink, core=False):
    setup = scenario.build()
    for experiment in experiments:
        ctx = Context(scenario.name, setup, config, sink)
        sink.guarded(scenario.name, experiment, EXPERIMENT_FUNCTIONS[experiment], ctx)
    if core and setup.space is not None:
        ctx = Context(scenario.name, setup, config, sink)
        sink.guarded(scenario.name, "core", core_audits, ctx, config.samples)
        sink.guarded(scenario.name, "weighted series", series_audits, ctx)


def coverage_frame(sink):
    rows = []
    for module, ops in OPERATIONS.items():
        for op in ops:
            where = sorted(sink.covered.get(op, ()))
            rows.append(
                {"module": module, "operation": op, "covered": int(bool(where)), "scenarios": ";".join(where)}
            )
    return pd.DataFrame(rows, columns=["module", "operation", "covered", "scenarios"])


def verify_suite(config, sink):
    """Every scenario with every experiment it supports plus the core audits; returns the coverage frame."""
    cfg = reduced(config)
    catalog = list_scenarios()
    sink.mark("catalog", "list_scenarios", "run")
    sink.add("catalog", check("catalog", "stable", 0.0 if catalog == list_scenarios() else 1.0, 0.0))
    for scenario in CATALOG:
        _run_scenario(scenario, scenario.experiments, cfg, sink, core=True)
    cov = coverage_frame(sink)
    for op in cov.loc[cov["covered"] == 0, "operation"]:
        sink.add("catalog", AuditRecord("coverage", op, 0.0, 1.0, FAIL))
    sink.add("catalog", note("coverage", "operations", int(cov["covered"].sum()), len(cov)))
    return cov


def _summary(config, record, sink, elapsed):
    lines = [
        f"config hash: {record.config_hash}",
        f"timestamp:   {record.timestamp}",
        f"experiment:  {config.experiment}",
        f"scenario:    {config.scenario or '-'}",
        f"radii:       {Quantity(min(config.r_schedule)):.3} .. {Quantity(max(config.r_schedule)):.3}",
        f"wall time:   {Quantity(elapsed, 's'):.3}",
        f"rows:        {len(sink.rows)}",
    ]
    for verdict, count in record.verdicts.items():
        lines.append(f"  {verdict:<20} {count}")
    lines.append("PASS" if record.passed else "FAIL")
    return "\n".join(lines) + "\n"


def run(config, verbose=None):
    """
    Execute the configured experiment and write its CSV files and summary.

    :param config: ExperimentConfig
    :param verbose: overrides ``config.verbose``
    :return: RunRecord
    """
    verbose = config.verbose if verbose is None else verbose
    if config.experiment != "verify-suite":
        scenario = get_scenario(config.scenario)
        if not scenario.supports(config.experiment):
            raise LabInputError(
                f"Scenario '{scenario.name}' does not support experiment '{config.experiment}' "
                f"(supported: {', '.join(scenario.experiments)})"
            )
    start = time.perf_counter()
    timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    sink = RowSink(verbose)
    stem = _stem(config.output)
    outputs = [config.output]
    coverage = None
    if config.experiment == "verify-suite":
        coverage = verify_suite(config, sink)
    else:
        _run_scenario(scenario, (config.experiment,), config, sink)
    _write(sink.frame(), config.output)
    if coverage is not None:
        outputs.append(stem + "_coverage.csv")
        _write(coverage, outputs[-1])
    if sink.samples:
        samples = pd.DataFrame(sink.samples)
        samples = samples.sort_values(["scenario", "R", "t"], kind="mergesort")
        outputs.append(stem + "_samples.csv")
        _write(samples, outputs[-1])
    passed = sink.passed
    record = RunRecord(config.digest(), timestamp, outputs, sink.verdicts(), passed, 0 if passed else 1)
    summary = stem + "_summary.txt"
    with open(summary, "w") as f:
        f.write(_summary(config, record, sink, time.perf_counter() - start))
    record.outputs.append(summary)
    if verbose:
        print(f"Wrote {', '.join(record.outputs)}")
    return record
