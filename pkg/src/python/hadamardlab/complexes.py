#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Unitriangular integer groups, their centers as lattices, virtual classes of
abelian lattices and the chain complexes assembled from them.

Central elements are coordinatized by the strictly upper entries of
``L_d log(g)`` with ``L_d = lcm(1, ..., d-1)``; for commuting elements the
logarithm is additive, so abelian subgroups become integer lattices.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import combinations

import numpy as np
from sympy import Matrix, Rational, eye, factorial, ilcm, zeros
from sympy.matrices.normalforms import hermite_normal_form

from .errors import LatticeError
from .reports import (
    FAIL,
    INAPPLICABLE,
    REQUIRES_DEGENERACY,
    AuditRecord,
    Report,
    check,
    note,
)

MAX_SIZE = 6
DEFAULT_BALL_RADIUS = 4
# entries beyond this are treated as structure-constant overflow
ENTRY_LIMIT = 2**40


def _unitriangular(m, name):
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"Input Error: generator of '{name}' is not square: shape {a.shape}")
    if not np.all(np.equal(np.mod(a, 1), 0)):
        raise ValueError(f"Input Error: generator of '{name}' has non-integer entries")
    a = a.astype(np.int64)
    if not np.all(np.diag(a) == 1) or np.any(np.tril(a, -1)):
        raise ValueError(f"Input Error: generator of '{name}' is not unitriangular")
    a.flags.writeable = False
    return a


def _guard(a):
    if np.max(np.abs(a)) > ENTRY_LIMIT:
        raise LatticeError(f"Structure-constant overflow: entry {np.max(np.abs(a))} exceeds {ENTRY_LIMIT}")
    return a


def _key(a):
    return a.tobytes()


def unitriangular_inverse(g):
    """``sum_k (I - g)^k``, exact for unitriangular g."""
    d = g.shape[0]
    n = np.eye(d, dtype=np.int64) - g
    out = np.eye(d, dtype=np.int64)
    p = np.eye(d, dtype=np.int64)
    for _ in range(d - 1):
        p = p @ n
        out = out + p
    return _guard(out)


def commutator(g, h):
    return _guard(g @ h @ unitriangular_inverse(g) @ unitriangular_inverse(h))


def log_scale(d):
    """``L_d = lcm(1, ..., d-1)``"""
    return reduce(math.lcm, range(1, max(d, 2)), 1)


def scaled_log(g):
    """``L_d log(g)``, an integer nilpotent matrix."""
    d = g.shape[0]
    L = log_scale(d)
    n = g - np.eye(d, dtype=np.int64)
    out = np.zeros((d, d), dtype=np.int64)
    p = np.eye(d, dtype=np.int64)
    for k in range(1, d):
        p = p @ n
        out = out + (-1) ** (k + 1) * (L // k) * p
    return _guard(out)


def log_coordinates(g):
    """Strictly upper entries of ``L_d log(g)`` in row-major order."""
    d = g.shape[0]
    return scaled_log(g)[np.triu_indices(d, 1)]


def element_from_coordinates(coords, d):
    """Inverse of ``log_coordinates``; the result must be an integer matrix."""
    L = log_scale(d)
    X = zeros(d, d)
    for (i, j), c in zip(zip(*np.triu_indices(d, 1)), coords):
        X[int(i), int(j)] = Rational(int(c), L)
    g = eye(d)
    p = eye(d)
    for k in range(1, d):
        p = p * X
        g = g + p / factorial(k)
    if any(not v.is_integer for v in g):
        raise LatticeError(f"Coordinates {list(coords)} are not the logarithm of an integer matrix")
    return np.array([[int(v) for v in row] for row in g.tolist()], dtype=np.int64)


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------


def _sympy_rows(rows, ncols):
    rows = np.asarray(rows).reshape(-1, ncols)
    return Matrix(rows.shape[0], ncols, [int(v) for v in rows.ravel()])


def _int_rows(M, ncols):
    values = [[int(v) for v in row] for row in M.tolist()]
    if any(abs(v) > ENTRY_LIMIT for row in values for v in row):
        raise LatticeError("Structure-constant overflow in a lattice basis")
    return np.array(values, dtype=np.int64).reshape(-1, ncols)


def hnf_rows(rows, ncols):
    """
    Hermite normal form basis (as rows) of the lattice generated by the rows.

    Zero rows are dropped; the result is canonical for the lattice.
    """
    M = _sympy_rows(rows, ncols)
    if M.rows == 0 or M.is_zero_matrix:
        return np.zeros((0, ncols), dtype=np.int64)
    # zero padding keeps every coordinate row in the elimination
    H = hermite_normal_form(M.T.row_join(zeros(ncols, ncols)))
    return _int_rows(H.T, ncols)


@dataclass(frozen=True, eq=False)
class AbelianLattice:
    """
    A lattice in ``Z^D`` given by a basis of rows.

    ``size`` is the matrix size d of the group whose log coordinates the
    lattice lives in, or None for a bare lattice.
    """

    basis: np.ndarray
    size: object = None

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2:
            raise ValueError(f"Input Error: lattice basis must be a matrix, got shape {b.shape}")
        b = b.astype(np.int64)
        if b.shape[0] and Matrix(b.tolist()).rank() != b.shape[0]:
            raise LatticeError(f"Lattice basis rows are dependent over Q:\n{b}")
        if self.size is not None and b.shape[1] != self.size * (self.size - 1) // 2:
            raise ValueError(
                f"Input Error: {b.shape[1]} coordinates do not fit {self.size}x{self.size} matrices"
            )
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_generators(cls, rows, ambient_dim, size=None):
        return cls(hnf_rows(rows, ambient_dim), size)

    @property
    def rank(self):
        return self.basis.shape[0]

    @property
    def ambient_dim(self):
        return self.basis.shape[1]

    def canonical(self):
        return tuple(map(tuple, hnf_rows(self.basis, self.ambient_dim).tolist()))

    def __eq__(self, other):
        return isinstance(other, AbelianLattice) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def scaled(self, m):
        return AbelianLattice(self.basis * int(m), self.size)

    def contains(self, other):
        """Integer containment ``other <= self``."""
        joined = np.vstack([self.basis, other.basis])
        return self.canonical() == tuple(map(tuple, hnf_rows(joined, self.ambient_dim).tolist()))

    def spans(self, other):
        """Rational containment of row spans."""
        if other.rank == 0:
            return True
        joined = Matrix(np.vstack([self.basis, other.basis]).tolist())
        return joined.rank() == self.rank

    def elements(self):
        """Basis elements as integer unitriangular matrices."""
        if self.size is None:
            raise ValueError("Input Error: a bare lattice has no matrix elements")
        return [element_from_coordinates(row, self.size) for row in self.basis]


def saturation(lattice):
    """
    ``span_Q(A) ∩ Z^D``.

    With R the rational row echelon form of A, the saturation is
    ``{a R : a in Z^r, a R integral}``; the admissible a are the part of the
    full-rank lattice generated by ``[I | den R]`` and ``[0 | den I]`` with
    vanishing second block, read off its Hermite normal form.
    """
    r, D = lattice.rank, lattice.ambient_dim
    if r == 0:
        return lattice
    R, _ = Matrix(lattice.basis.tolist()).rref()
    den = reduce(ilcm, (v.q for v in R), 1)
    gamma = Matrix.vstack(
        Matrix.hstack(eye(r), R * den),
        Matrix.hstack(zeros(D, r), eye(D) * den),
    )
    # rebuild from entries so sympy infers ZZ (rref leaves an internal QQ domain)
    H = hermite_normal_form(Matrix(gamma.T.tolist()))
    admissible = H[:r, :r].T
    return AbelianLattice.from_generators(
        _int_rows(admissible * R, D), D, lattice.size
    )


@dataclass(frozen=True)
class VirtualClass:
    """Rational span of a lattice, stored as the HNF basis of its saturation."""

    saturation: tuple

    @property
    def rank(self):
        return len(self.saturation)

    def __lt__(self, other):
        if self.rank >= other.rank:
            return False
        if not self.saturation:
            return True
        joined = Matrix(list(self.saturation) + list(other.saturation))
        return joined.rank() == other.rank

    def __str__(self):
        return "[" + ";".join(",".join(str(v) for v in row) for row in self.saturation) + "]"


def virtual_class_of(lattice):
    return VirtualClass(saturation(lattice).canonical())


# ---------------------------------------------------------------------------
# unitriangular groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NilpotentGroupData:
    """
    Group generated by unitriangular integer matrices of a common size.

    Membership is decided inside the word ball of radius ``radius``.
    """

    generators: tuple
    name: str = "N"
    radius: int = DEFAULT_BALL_RADIUS

    def __post_init__(self):
        gens = tuple(_unitriangular(g, self.name) for g in self.generators)
        if not gens:
            raise ValueError(f"Input Error: group '{self.name}' has no generators")
        d = gens[0].shape[0]
        if any(g.shape[0] != d for g in gens):
            raise ValueError(f"Input Error: generators of '{self.name}' differ in size")
        if not 2 <= d <= MAX_SIZE:
            raise ValueError(f"Input Error: matrix size {d} of '{self.name}' outside [2, {MAX_SIZE}]")
        object.__setattr__(self, "generators", gens)

    @property
    def size(self):
        return self.generators[0].shape[0]

    @property
    def coordinate_dim(self):
        return self.size * (self.size - 1) // 2

    @cached_property
    def ball(self):
        """Elements of word length at most ``radius``, keyed by their bytes."""
        letters = []
        for g in self.generators:
            letters.extend([g, unitriangular_inverse(g)])
        e = np.eye(self.size, dtype=np.int64)
        seen = {_key(e): e}
        frontier = deque([(e, 0)])
        while frontier:
            g, length = frontier.popleft()
            if length >= self.radius:
                continue
            for a in letters:
                h = _guard(g @ a)
                k = _key(h)
                if k not in seen:
                    seen[k] = h
                    frontier.append((h, length + 1))
        return seen

    def __contains__(self, g):
        return _key(np.asarray(g, dtype=np.int64)) in self.ball

    def is_central(self, g):
        return all(np.array_equal(g @ a, a @ g) for a in self.generators)

    @cached_property
    def center(self):
        return center_of(self)


def power_generators(group, e):
    """The group generated by ``g^e`` for the generators g."""
    e = int(e)
    if e < 1:
        raise ValueError(f"Input Error: exponent must be positive, got {e}")
    gens = [_guard(np.linalg.matrix_power(g, e)) for g in group.generators]
    return NilpotentGroupData(tuple(gens), f"{group.name}^{e}", group.radius)


def embed_block(group, size, offset, name=None):
    """Place every generator as a diagonal block of a ``size`` identity at ``offset``."""
    d = group.size
    if offset < 0 or offset + d > size:
        raise ValueError(f"Input Error: block of size {d} at {offset} does not fit in {size}")
    gens = []
    for g in group.generators:
        m = np.eye(size, dtype=np.int64)
        m[offset : offset + d, offset : offset + d] = g
        gens.append(m)
    return NilpotentGroupData(tuple(gens), name or f"{group.name}@{offset}", group.radius)


def direct_product(*groups, name=None):
    """Block-diagonal product of the given groups."""
    size = sum(g.size for g in groups)
    gens = []
    offset = 0
    for g in groups:
        gens.extend(embed_block(g, size, offset).generators)
        offset += g.size
    radius = max(g.radius for g in groups)
    return NilpotentGroupData(tuple(gens), name or "x".join(g.name for g in groups), radius)


def elementary(d, i, j, value=1):
    m = np.eye(d, dtype=np.int64)
    m[i, j] = value
    return m


def heisenberg(name="H3"):
    """``H_3(Z)`` with generators x, y; ``[x, y]`` is the central z."""
    return NilpotentGroupData((elementary(3, 0, 1), elementary(3, 1, 2)), name)


def free_abelian(rank, size=None, name=None):
    """``Z^rank`` as first-row elementary matrices."""
    size = rank + 1 if size is None else size
    if rank > size - 1:
        raise ValueError(f"Input Error: rank {rank} does not fit {size}x{size} first-row matrices")
    gens = tuple(elementary(size, 0, j + 1) for j in range(rank))
    return NilpotentGroupData(gens, name or f"Z{rank}")


def _coords(X):
    d = X.shape[0]
    return [X[i, j] for i, j in zip(*np.triu_indices(d, 1))]


def _lie_closure(logs):
    """Rational basis of the Lie algebra generated by the given matrices."""
    basis = []
    span = Matrix(0, 0, [])
    queue = deque(logs)
    while queue:
        X = queue.popleft()
        v = Matrix([_coords(X)])
        trial = v if span.rows == 0 else span.col_join(v)
        if trial.rank() > len(basis):
            span = trial
            new = X
            for Y in list(basis):
                queue.append(new * Y - Y * new)
            basis.append(new)
    return basis


def center_dimension(group):
    """Dimension of the center of the rational Lie algebra of the group."""
    logs = [Matrix(scaled_log(g).tolist()) for g in group.generators]
    basis = _lie_closure(logs)
    if not basis:
        return 0
    conditions = Matrix.vstack(
        *[
            Matrix([_coords(B * G - G * B) for B in basis]).T
            for G in logs
        ]
    )
    return len(conditions.nullspace())


def center_of(group):
    """
    Center of the group as a lattice of log coordinates.

    The central elements of the word ball generate the lattice; its rank
    must match the dimension of the Lie algebra center.

    Raises
    ------
    LatticeError
        If the ball does not realize the full center, or on overflow.
    """
    central = [g for g in group.ball.values() if group.is_central(g)]
    rows = [log_coordinates(g) for g in central]
    lattice = AbelianLattice.from_generators(
        np.array(rows).reshape(-1, group.coordinate_dim), group.coordinate_dim, group.size
    )
    expected = center_dimension(group)
    if lattice.rank != expected:
        raise LatticeError(
            f"Word ball of radius {group.radius} of '{group.name}' realizes a center of rank "
            f"{lattice.rank}, expected {expected}"
        )
    return lattice


def check_chain(chain):
    """Strict inclusions ``N_0 < ... < N_k`` verified on generators."""
    chain = list(chain)
    if not chain:
        raise ValueError("Input Error: empty chain")
    d = chain[0].size
    for g in chain:
        if g.size != d:
            raise ValueError(
                f"Input Error: chain mixes matrix sizes ({chain[0].name}: {d}, {g.name}: {g.size})"
            )
    for a, b in zip(chain, chain[1:]):
        for j, g in enumerate(a.generators):
            if g not in b:
                raise LatticeError(
                    f"Inclusion {a.name} < {b.name} fails: generator {j} of {a.name} "
                    f"is not in the radius {b.radius} ball of {b.name}"
                )
    return chain


def zeta_map(chain):
    """
    The abelian group generated by the centers of a chain, as a lattice.

    Raises
    ------
    LatticeError
        If two center generators fail to commute.
    """
    chain = check_chain(chain)
    centers = [g.center for g in chain]
    elements = []
    for z in centers:
        for row, m in zip(z.basis, z.elements()):
            elements.append((row, m))
    for (_, a), (_, b) in combinations(elements, 2):
        if not np.array_equal(commutator(a, b), np.eye(a.shape[0], dtype=np.int64)):
            raise LatticeError(
                f"Centers along {' < '.join(g.name for g in chain)} do not commute"
            )
    D = chain[0].coordinate_dim
    rows = np.array([row for row, _ in elements]).reshape(-1, D)
    return AbelianLattice.from_generators(rows, D, chain[0].size)


# ---------------------------------------------------------------------------
# class complexes
# ---------------------------------------------------------------------------


@dataclass
class ChainComplexModel:
    """
    Simplicial complex of virtual classes.

    ``simplices`` holds vertex index tuples ordered by inclusion, closed under
    faces; ``maximal`` pairs every input simplex with its ambient dimension
    annotation (or None).
    """

    vertices: list
    lattices: list
    simplices: set
    maximal: list
    collapsed: list
    report: Report = None

    @property
    def dimension(self):
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @property
    def f_vector(self):
        f = [0] * (self.dimension + 1)
        for s in self.simplices:
            f[len(s) - 1] += 1
        return f

    @property
    def max_rank(self):
        return max((v.rank for v in self.vertices), default=0)

    def label(self, simplex):
        return "<".join(str(self.vertices[i]) for i in simplex)


def build_class_complex(chains, ambient=None):
    """
    Assemble the complex of virtual classes ``[zeta(N_0..N_j)]`` over every
    prefix of every chain; consecutive repeated classes collapse.

    Audits ``rank(A_k) >= k+1`` on every simplex and
    ``dim <= max rank - 1`` on the complex.
    """
    chains = list(chains)
    ambient = [None] * len(chains) if ambient is None else list(ambient)
    if len(ambient) != len(chains):
        raise ValueError("Input Error: one ambient dimension per chain is required")
    vertices, lattices, index = [], [], {}
    simplices, maximal, collapsed = set(), [], []
    for chain, n in zip(chains, ambient):
        chain = check_chain(chain)
        path = []
        for j in range(len(chain)):
            A = zeta_map(chain[: j + 1])
            cls = virtual_class_of(A)
            if cls not in index:
                index[cls] = len(vertices)
                vertices.append(cls)
                lattices.append(A)
            v = index[cls]
            if path and path[-1] == v:
                collapsed.append((chain[j].name, str(cls)))
                continue
            if path and not vertices[path[-1]] < cls:
                raise LatticeError(
                    f"Classes along the chain at {chain[j].name} are not strictly increasing"
                )
            path.append(v)
        simplex = tuple(path)
        maximal.append((simplex, n))
        for r in range(1, len(simplex) + 1):
            simplices.update(combinations(simplex, r))
    model = ChainComplexModel(vertices, lattices, simplices, maximal, collapsed)
    rep = Report("class complex")
    for s in sorted(simplices, key=lambda s: (len(s), s)):
        k = len(s) - 1
        rep.add(check("complex rank", model.label(s), k + 1, vertices[s[-1]].rank))
    rep.add(check("complex dimension", "dim", model.dimension, model.max_rank - 1))
    for name, cls in collapsed:
        rep.add(note("complex collapse", f"{name}:{cls}", 1.0))
    for k, count in enumerate(model.f_vector):
        rep.add(note("complex f-vector", f"f{k}", count))
    rep.details.update(
        {"dimension": model.dimension, "max_rank": model.max_rank, "f_vector": model.f_vector}
    )
    model.report = rep
    return model


def half_dimension_report(complex_, n=None):
    """
    ``k <= floor(n/2) - 1`` for every input simplex of dimension k acting on
    an n-dimensional model; simplices beyond the bound are flagged as
    requiring a degenerate Busemann simplex.
    """
    name = "half dimension"
    rep = Report(name)
    flagged = []
    for simplex, annotated in complex_.maximal:
        dim = annotated if n is None else n
        k = len(simplex) - 1
        key = complex_.label(simplex)
        if dim is None:
            rep.add(AuditRecord(name, key, float(k), float("nan"), INAPPLICABLE))
            continue
        bound = dim // 2 - 1
        if k <= bound:
            rep.add(check(name, f"{key},n={dim}", k, bound))
        else:
            flagged.append((simplex, dim))
            rep.add(AuditRecord(name, f"{key},n={dim}", float(k), float(bound), REQUIRES_DEGENERACY))
    rep.details["flagged"] = flagged
    if flagged and rep.verdict != FAIL:
        rep.verdict = REQUIRES_DEGENERACY
    return rep


@dataclass
class GroupInstances:
    """Groups and chains read from an instance file."""

    groups: dict = field(default_factory=dict)
    chains: list = field(default_factory=list)
    ambient: list = field(default_factory=list)

    def chain_groups(self):
        return [[self.groups[name] for name in chain] for chain in self.chains]
