#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Bundled scenario catalog.

Every scenario builds its geometric or algebraic data lazily through
``Scenario.build()``; nothing is computed at import time.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..complexes import (
    GroupInstances,
    direct_product,
    embed_block,
    free_abelian,
    heisenberg,
    power_generators,
)
from ..dynamics import FiniteBoundarySet, JoinFan
from ..isometries import boost, parabolic, product_isometry, translation
from ..models import (
    ModelPoint,
    boundary_point,
    euclidean,
    hyperbolic,
    ideal_point,
    join,
    product,
)
from ..simplex import SimplexSpec

MODELS = "hadamard-models"
BUSEMANN = "busemann-core"
CONVEX = "convex-geometry"
SIMPLEX = "busemann-simplex"
DYNAMICS = "isometry-dynamics"
COMPLEX = "abelian-complex"


@dataclass
class Setup:
    """
    Data of one scenario.

    ``series`` lists ``(label, generators, c, subgroup, r_cut)`` tuples for
    the weighted displacement series; ``pairs`` lists commuting
    ``(isometry, Busemann function)`` pairs for the horosphere audits.
    """

    space: object = None
    spec: object = None
    control: object = None
    group: list = field(default_factory=list)
    second_basepoint: object = None
    series: list = field(default_factory=list)
    pairs: list = field(default_factory=list)
    tracked: object = None
    pure_axis: object = None
    pure_parabolic: object = None
    km_bound: float = 0.01
    class_generators: list = field(default_factory=list)
    F_A: object = None
    expected_theta: object = None
    center_sets: list = field(default_factory=list)
    instances: object = None


@dataclass(frozen=True)
class Scenario:
    name: str
    model: str
    modules: tuple
    experiments: tuple
    description: str
    build: object

    def supports(self, experiment):
        return experiment in self.experiments


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _padded(v, n):
    out = np.zeros(n)
    out[: len(v)] = v
    return out


def _flat(n, vertex_dirs, translation_axes):
    space = euclidean(n)
    o = space.origin()
    centers = [boundary_point(space, _padded(_unit(v), n)) for v in vertex_dirs]
    spec = SimplexSpec.from_centers(centers, o)
    group = [
        translation(space, np.eye(n)[i], name=f"t{i + 1}") for i in translation_axes
    ]
    # coincident vertices: the degenerate control simplex
    control = SimplexSpec.from_centers([centers[0], centers[0]], o)
    shift = np.zeros(n)
    shift[:3] = [1.5, -2.0, 1.0]
    second = ModelPoint(space, shift)
    pairs = [(g, h) for g in group for h in spec.vertices]
    return Setup(
        space=space,
        spec=spec,
        control=control,
        group=group,
        second_basepoint=second,
        pairs=pairs,
    )


def _flat_k1():
    return _flat(5, [[1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]], [3, 4])


def _flat_k2():
    dirs = [np.eye(3)[i] + 0.5 for i in range(3)]
    return _flat(6, dirs, [4, 5])


def _cusp():
    space = hyperbolic(2)
    o = space.origin()
    inf = ideal_point(space)
    spec = SimplexSpec.from_centers([inf], o)
    p = parabolic(space, 1.0, name="p")
    b = boost(space, 1.0, name="b")
    return Setup(
        space=space,
        spec=spec,
        group=[p],
        second_basepoint=ModelPoint(space, np.array([0.8, 0.6])),
        series=[("parabolic", [p], 1.0, [p], 6), ("hyperbolic", [b], 1.0, [b], 6)],
        pairs=[(p, spec.vertices[0])],
        class_generators=[p],
        F_A=FiniteBoundarySet([inf]),
        center_sets=[[inf]],
    )


def _product_z2():
    h2 = hyperbolic(2)
    space = product(h2, h2)
    o = space.origin()
    inf = ideal_point(h2)
    centers = [join(space, [inf, inf], theta=math.pi / 8), join(space, [inf, inf], theta=3 * math.pi / 8)]
    spec = SimplexSpec.from_centers(centers, o)
    p = parabolic(h2, 1.0, name="p")
    a1 = product_isometry(space, p, None, name="(p,id)")
    a2 = product_isometry(space, None, p, name="(id,p)")
    fan = JoinFan(space, [[np.array([1.0, 0.0])], [np.array([1.0, 0.0])]])
    thetas = [[0.1, 0.5, 1.2], [0.0, math.pi / 2], [0.3, 0.35, 0.9, 1.0]]
    sets = [[join(space, [inf, inf], theta=t) for t in ts] for ts in thetas]
    return Setup(
        space=space,
        spec=spec,
        control=SimplexSpec.from_centers([centers[0], centers[0]], o),
        group=[a1, a2],
        second_basepoint=ModelPoint(space, np.array([0.5, -0.4, -1.0, 0.7])),
        series=[("parabolic", [a1, a2], 2.0, [a1, a2], 4)],
        pairs=[(g, h) for g in (a1, a2) for h in spec.vertices],
        class_generators=[a1, a2],
        F_A=fan,
        expected_theta=math.pi / 4,
        center_sets=sets,
    )


def _product_km():
    h2 = hyperbolic(2)
    space = product(h2, h2)
    b = boost(h2, 1.0, name="b")
    p = parabolic(h2, 1.0, name="p")
    return Setup(
        space=space,
        tracked=product_isometry(space, b, p, name="(b,p)"),
        pure_axis=product_isometry(space, b, None, name="(b,id)"),
        pure_parabolic=product_isometry(space, p, p, name="(p,p)"),
        km_bound=0.01,
    )


def _heisenberg_chain():
    h3 = heisenberg()
    small = embed_block(h3, 6, 0, name="h3")
    big = direct_product(h3, heisenberg(), name="h3xh3")
    inst = GroupInstances()
    inst.groups = {"h3": small, "h3xh3": big}
    inst.chains = [["h3", "h3xh3"]]
    inst.ambient = [4]
    return Setup(instances=inst)


def _flag():
    z1, z2, z3 = (free_abelian(r, size=4) for r in (1, 2, 3))
    z1_2 = power_generators(z1, 2)
    inst = GroupInstances()
    inst.groups = {g.name: g for g in (z1, z2, z3, z1_2)}
    inst.chains = [["Z1", "Z2", "Z3"], ["Z1", "Z2"], [z1_2.name, "Z1"]]
    inst.ambient = [4, 5, None]
    return Setup(instances=inst)


CATALOG = (
    Scenario(
        "flat-orthogonal-k1",
        "E5",
        (MODELS, BUSEMANN, CONVEX, SIMPLEX),
        ("simplex", "projection-audit"),
        "Edge at Tits angle pi/3, translations orthogonal to the vertex span",
        _flat_k1,
    ),
    Scenario(
        "flat-orthogonal-k2",
        "E6",
        (MODELS, BUSEMANN, CONVEX, SIMPLEX),
        ("simplex", "projection-audit"),
        "Triangle of acute vertex directions, translations orthogonal to the vertex span",
        _flat_k2,
    ),
    Scenario(
        "H2-parabolic-cusp",
        "H2",
        (MODELS, BUSEMANN, CONVEX, SIMPLEX, DYNAMICS),
        ("simplex", "projection-audit", "center"),
        "Single vertex at the cusp of a parabolic Z; parabolic and hyperbolic series",
        _cusp,
    ),
    Scenario(
        "product-H2xH2-Z2",
        "H2xH2",
        (MODELS, BUSEMANN, CONVEX, SIMPLEX, DYNAMICS),
        ("simplex", "projection-audit", "center"),
        "Edge of joins at theta pi/8 and 3pi/8 preserved by parabolic Z^2",
        _product_z2,
    ),
    Scenario(
        "product-km-mixed",
        "H2xH2",
        (MODELS, BUSEMANN, DYNAMICS),
        ("tracking",),
        "Boost times parabolic; pure axis and pure parabolic controls",
        _product_km,
    ),
    Scenario(
        "heisenberg-chain",
        "H3(Z) < H3(Z)xH3(Z)",
        (COMPLEX,),
        ("complex",),
        "Heisenberg block inside the product of two Heisenberg groups",
        _heisenberg_chain,
    ),
    Scenario(
        "flag-Z1Z2Z3",
        "Z1 < Z2 < Z3",
        (COMPLEX,),
        ("complex",),
        "Flag of free abelian groups; over-rank chain and a finite-index collapse",
        _flag,
    ),
)


def scenario_names():
    return tuple(s.name for s in CATALOG)


def get_scenario(name):
    for s in CATALOG:
        if s.name == name:
            return s
    raise KeyError(name)


def list_scenarios():
    """Catalog text: one line per scenario with model, experiments and module coverage."""
    width = max(len(s.name) for s in CATALOG)
    lines = []
    for s in CATALOG:
        lines.append(
            f"{s.name:<{width}}  {s.model:<22}  experiments: {', '.join(s.experiments)}"
        )
        lines.append(f"{'':<{width}}  modules: {', '.join(s.modules)}")
        lines.append(f"{'':<{width}}  {s.description}")
    return "\n".join(lines) + "\n"
