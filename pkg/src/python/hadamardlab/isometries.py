#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Isometries of the model spaces, stored factor by factor.

Hyperbolic isometries that fix the chart's point at infinity are kept as
:class:`HalfSpaceMotion` (similarities of the half-space chart), which makes
long orbits and high powers exact. Everything else in a hyperbolic factor is
a :class:`LorentzMotion` acting on hyperboloid coordinates.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, OrbitOverflowError
from .models import (
    EUCLIDEAN,
    HYPERBOLIC,
    BoundaryPoint,
    ModelPoint,
    TangentVector,
    _beta_from_v,
    _chart_frame,
    _chart_to_hyperboloid,
    _hyp_exp,
    _householder_to_e1,
    _hyperboloid_to_chart,
    _readonly,
    _v_from_beta,
    minkowski_dot,
)

ORTHOGONAL_TOL = 1e-10
KEY_DIGITS = 10
# rounding splits a parabolic Jordan block into eigenvalues of modulus
# 1 + O(eps^(1/3) |M|^(2/3)); loxodromic lengths must clear this floor
JORDAN_FLOOR = 8.0 * np.finfo(float).eps ** (1.0 / 3.0)
NULL_TOL = 1e-6
# orbit drift allowed from the rounding floor before powers stop resolving
RESOLVED_DRIFT = 0.1


def _orthogonal(m, n, name):
    m = np.array(np.eye(n) if m is None else m, dtype=float)
    if m.shape != (n, n):
        raise GeometryError(f"{name} must be {n}x{n}, got shape {m.shape}")
    if not np.allclose(m.T @ m, np.eye(n), atol=ORTHOGONAL_TOL, rtol=0.0):
        raise GeometryError(f"{name} is not orthogonal")
    m.flags.writeable = False
    return m


def _round_key(*arrays):
    out = []
    for a in arrays:
        r = np.round(np.asarray(a, dtype=float).reshape(-1), KEY_DIGITS)
        r[r == 0.0] = 0.0  # fold -0.0
        out.append(tuple(r.tolist()))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class EuclideanMotion:
    """x -> rotation @ x + translation"""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        t = _readonly(self.translation, name="Translation")
        object.__setattr__(self, "translation", t)
        object.__setattr__(
            self, "rotation", _orthogonal(self.rotation, t.shape[0], "Rotation")
        )

    @property
    def n(self):
        return self.translation.shape[0]

    def apply(self, c):
        return self.rotation @ c + self.translation

    def push(self, c, w):
        return self.rotation @ w

    def apply_direction(self, d):
        return self.rotation @ d

    def compose(self, other):
        return EuclideanMotion(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self):
        rt = self.rotation.T
        return EuclideanMotion(rt, -(rt @ self.translation))

    def translation_length(self):
        # translation component along the fixed space of the rotation
        a = self.rotation - np.eye(self.n)
        if not np.any(np.abs(a) > ORTHOGONAL_TOL):
            return float(np.linalg.norm(self.translation))
        u, sv, vt = np.linalg.svd(a)
        kernel = vt[sv < 1e-9]
        if kernel.shape[0] == 0:
            return 0.0
        return float(np.linalg.norm(kernel @ self.translation))

    def key(self):
        return ("E",) + _round_key(self.rotation, self.translation)

    def is_identity(self):
        return np.allclose(self.rotation, np.eye(self.n), atol=1e-12) and not np.any(
            np.abs(self.translation) > 1e-12
        )


@dataclass(frozen=True, eq=False)
class HalfSpaceMotion:
    """
    Similarity of the half-space chart fixing its point at infinity:
    ``(u, s) -> (exp(log_scale) rotation @ u + shift, s + log_scale)``.
    """

    log_scale: float
    rotation: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        c = _readonly(self.shift, name="Shift")
        object.__setattr__(self, "shift", c)
        object.__setattr__(self, "log_scale", float(self.log_scale))
        object.__setattr__(
            self, "rotation", _orthogonal(self.rotation, c.shape[0], "Rotation")
        )

    @property
    def n(self):
        return self.shift.shape[0] + 1

    def apply(self, c):
        u, s = c[:-1], c[-1]
        return np.concatenate(
            [math.exp(self.log_scale) * (self.rotation @ u) + self.shift,
             [s + self.log_scale]]
        )

    def push(self, c, w):
        return np.concatenate([self.rotation @ w[:-1], [w[-1]]])

    def apply_direction(self, v):
        beta = _beta_from_v(v)
        if beta is None:
            return np.array(v)
        return _v_from_beta(math.exp(self.log_scale) * (self.rotation @ beta) + self.shift)

    def compose(self, other):
        if isinstance(other, HalfSpaceMotion):
            return HalfSpaceMotion(
                self.log_scale + other.log_scale,
                self.rotation @ other.rotation,
                math.exp(self.log_scale) * (self.rotation @ other.shift) + self.shift,
            )
        return LorentzMotion(self.lorentz()).compose(other)

    def inverse(self):
        rt = self.rotation.T
        return HalfSpaceMotion(
            -self.log_scale, rt, -math.exp(-self.log_scale) * (rt @ self.shift)
        )

    def translation_length(self):
        return abs(self.log_scale)

    def lorentz(self):
        """Lorentz matrix of the motion, from n+1 independent hyperboloid points."""
        n = self.n
        charts = [np.zeros(n)]
        for j in range(n):
            w = np.zeros(n)
            w[j] = 1.0
            charts.append(_hyp_exp(np.zeros(n), w))
        p = np.array([_chart_to_hyperboloid(c) for c in charts]).T
        q = np.array([_chart_to_hyperboloid(self.apply(c)) for c in charts]).T
        return np.linalg.solve(p.T, q.T).T

    def key(self):
        return ("H",) + _round_key([self.log_scale], self.rotation, self.shift)

    def is_identity(self):
        return (
            abs(self.log_scale) < 1e-12
            and np.allclose(self.rotation, np.eye(self.n - 1), atol=1e-12)
            and not np.any(np.abs(self.shift) > 1e-12)
        )


@dataclass(frozen=True, eq=False)
class LorentzMotion:
    """A hyperbolic isometry given by a matrix preserving the Minkowski form."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        k = m.shape[0]
        if m.ndim != 2 or m.shape != (k, k) or k < 3:
            raise GeometryError(f"Lorentz matrix has invalid shape {m.shape}")
        j = np.diag([1.0] * (k - 1) + [-1.0])
        scale = max(1.0, float(np.max(np.abs(m))) ** 2)
        if not np.allclose(m.T @ j @ m, j, atol=ORTHOGONAL_TOL * scale, rtol=0.0):
            raise GeometryError("Matrix does not preserve the Minkowski form")
        if m[-1, -1] <= 0.0:
            raise GeometryError("Matrix does not preserve the upper sheet")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self):
        return self.matrix.shape[0] - 1

    def apply(self, c):
        return _hyperboloid_to_chart(self.matrix @ _chart_to_hyperboloid(c))

    def push(self, c, w):
        v = w @ _chart_frame(c)
        lv = self.matrix @ v
        frame = _chart_frame(self.apply(c))
        return np.array([minkowski_dot(lv, f) for f in frame])

    def apply_direction(self, v):
        b = self.matrix @ np.concatenate([v, [1.0]])
        return b[:-1] / b[-1]

    def compose(self, other):
        m = other.lorentz() if isinstance(other, HalfSpaceMotion) else other.matrix
        return LorentzMotion(self.matrix @ m)

    def inverse(self):
        j = np.diag([1.0] * self.n + [-1.0])
        return LorentzMotion(j @ self.matrix.T @ j)

    def lorentz(self):
        return np.array(self.matrix)

    def translation_length(self):
        """
        ``log`` of the real eigenvalue above one, whose eigenvector is null
        (the attracting fixed point). Zero for elliptics and parabolics, whose
        eigenvalues all have modulus one up to the rounding floor.
        """
        vals, vecs = np.linalg.eig(self.matrix)
        top = int(np.argmax(np.abs(vals)))
        lam = vals[top]
        floor = self.rounding_floor()
        if abs(lam.imag) > floor * abs(lam) or lam.real <= 0.0:
            return 0.0
        ell = math.log(lam.real)
        if ell <= floor:
            return 0.0
        v = np.real(vecs[:, top])
        if abs(minkowski_dot(v, v)) > NULL_TOL * float(v @ v):
            return 0.0
        return ell

    def rounding_floor(self):
        return JORDAN_FLOOR * max(1.0, float(np.linalg.norm(self.matrix, 2))) ** (2.0 / 3.0)

    def key(self):
        return ("L",) + _round_key(self.matrix)

    def is_identity(self):
        return np.allclose(self.matrix, np.eye(self.n + 1), atol=1e-12)


@dataclass(frozen=True, eq=False)
class Isometry:
    """
    An isometry of a model space: one motion per factor.

    Attributes
    ----------
    space : ModelSpace
    motions : tuple
        ``EuclideanMotion`` for Euclidean factors, ``HalfSpaceMotion`` or
        ``LorentzMotion`` for hyperbolic ones.
    name : str
        Label used in reports and word enumeration.
    """

    space: object
    motions: tuple
    name: str = ""

    def __post_init__(self):
        blocks = self.space.blocks
        if len(self.motions) != len(blocks):
            raise GeometryError("One motion per factor is required")
        for m, (f, _) in zip(self.motions, blocks):
            expected = (EuclideanMotion,) if f.kind == EUCLIDEAN else (
                HalfSpaceMotion,
                LorentzMotion,
            )
            if not isinstance(m, expected) or m.n != f.n:
                raise GeometryError(f"Motion {m} does not act on factor {f}")

    def __call__(self, x):
        return self.apply(x)

    def apply(self, x):
        if x.space != self.space:
            raise GeometryError(f"Isometry of {self.space} applied to {x.space}")
        parts = [m.apply(x.coords[sl]) for m, (_, sl) in zip(self.motions, self.space.blocks)]
        c = np.concatenate(parts)
        if not np.all(np.isfinite(c)):
            raise OrbitOverflowError(
                f"Image of {x} under {self.name or 'isometry'} overflowed"
            )
        return ModelPoint(self.space, c)

    def apply_boundary(self, xi):
        dirs = []
        for m, d in zip(self.motions, xi.directions):
            dirs.append(None if d is None else m.apply_direction(d))
        return BoundaryPoint(self.space, xi.weights, tuple(dirs))

    def differential(self, v):
        """Push a tangent vector at x forward to a tangent vector at g(x)."""
        x = v.at
        parts = [
            m.push(x.coords[sl], v.components[sl])
            for m, (_, sl) in zip(self.motions, self.space.blocks)
        ]
        return TangentVector(self.apply(x), np.concatenate(parts))

    def compose(self, other):
        """self after other"""
        if other.space != self.space:
            raise GeometryError("Cannot compose isometries of different spaces")
        return Isometry(
            self.space,
            tuple(a.compose(b) for a, b in zip(self.motions, other.motions)),
            f"{self.name}*{other.name}" if self.name and other.name else "",
        )

    def __matmul__(self, other):
        return self.compose(other)

    def inverse(self):
        return Isometry(
            self.space,
            tuple(m.inverse() for m in self.motions),
            f"{self.name}^-1" if self.name else "",
        )

    def power(self, k):
        """g^k by repeated squaring; negative k uses the inverse."""
        k0 = int(k)
        base = self if k0 >= 0 else self.inverse()
        k = abs(k0)
        result = identity(self.space)
        while k:
            if k & 1:
                result = result.compose(base)
            base = base.compose(base)
            k >>= 1
        return Isometry(
            self.space, result.motions, f"{self.name}^{k0}" if self.name else ""
        )

    def conjugate(self, g):
        """g self g^-1"""
        return g.compose(self).compose(g.inverse())

    def orbit(self, x, n):
        """[x, g x, ..., g^n x] by iteration."""
        out = [x]
        for _ in range(int(n)):
            out.append(self.apply(out[-1]))
        return out

    def translation_length(self):
        """Exact infimum displacement |g| for the closed-form motion classes."""
        return math.hypot(*[m.translation_length() for m in self.motions])

    def resolved_power(self):
        """Largest power whose orbit the rounded Lorentz factors still resolve."""
        floors = [m.rounding_floor() for m in self.motions if isinstance(m, LorentzMotion)]
        return RESOLVED_DRIFT / max(floors) if floors else math.inf

    def lorentz_matrices(self):
        return [
            m.lorentz() if not isinstance(m, EuclideanMotion) else None
            for m in self.motions
        ]

    def key(self):
        return tuple(m.key() for m in self.motions)

    def is_identity(self):
        return all(m.is_identity() for m in self.motions)

    def commutes_with(self, other, tol=1e-9):
        return _same_motion(self.compose(other), other.compose(self), tol)

    def __repr__(self):
        return f"Isometry({self.space}, {self.name or '<anonymous>'})"


def _same_motion(a, b, tol):
    for ma, mb in zip(a.motions, b.motions):
        ka = np.concatenate([np.ravel(p) for p in _params(ma)])
        kb = np.concatenate([np.ravel(p) for p in _params(mb)])
        if ka.shape != kb.shape or not np.allclose(ka, kb, atol=tol):
            return False
    return True


def _params(m):
    if isinstance(m, EuclideanMotion):
        return [m.rotation, m.translation]
    if isinstance(m, HalfSpaceMotion):
        return [[m.log_scale], m.rotation, m.shift]
    return [m.matrix]


def _identity_motion(f):
    if f.kind == EUCLIDEAN:
        return EuclideanMotion(np.eye(f.n), np.zeros(f.n))
    return HalfSpaceMotion(0.0, np.eye(f.n - 1), np.zeros(f.n - 1))


def identity(space):
    return Isometry(space, tuple(_identity_motion(f) for f, _ in space.blocks), "id")


def _single(space, motion, name):
    if space.n_factors != 1:
        raise GeometryError("Use product_isometry() for products")
    return Isometry(space, (motion,), name)


def translation(space, v, name="translation"):
    """Euclidean translation by v."""
    if space.kind != EUCLIDEAN:
        raise GeometryError("translation() needs a Euclidean space")
    return _single(space, EuclideanMotion(np.eye(space.n), v), name)


def rotation(space, matrix, name="rotation"):
    """
    Rotation about the origin: a Euclidean orthogonal map or, for a
    hyperbolic space, the Lorentz matrix ``diag(matrix, 1)``.
    """
    m = np.asarray(matrix, dtype=float)
    if space.kind == EUCLIDEAN:
        return _single(space, EuclideanMotion(m, np.zeros(space.n)), name)
    if space.kind == HYPERBOLIC:
        big = np.eye(space.n + 1)
        big[:-1, :-1] = m
        return _single(space, LorentzMotion(big), name)
    raise GeometryError("rotation() needs a factor space")


def rotation_to_infinity(space, direction, name="chart rotation"):
    """
    Rotation about the origin of a hyperbolic space sending the ideal point
    with unit direction ``direction`` to the chart's point at infinity.

    Points far out toward the chart's infinity are stored exactly, so
    configurations are conjugated by this rotation before large-radius work.
    """
    if space.kind != HYPERBOLIC:
        raise GeometryError("rotation_to_infinity() needs a hyperbolic space")
    d = np.asarray(direction, dtype=float)
    return rotation(space, _householder_to_e1(d / np.linalg.norm(d)), name)


def boost(space, length, name="boost"):
    """Hyperboloid boost of the given length along the x_1 axis."""
    if space.kind != HYPERBOLIC:
        raise GeometryError("boost() needs a hyperbolic space")
    return _single(
        space, HalfSpaceMotion(length, np.eye(space.n - 1), np.zeros(space.n - 1)), name
    )


def parabolic(space, shift, name="parabolic"):
    """Half-space translation z -> z + shift, fixing the chart's infinity."""
    if space.kind != HYPERBOLIC:
        raise GeometryError("parabolic() needs a hyperbolic space")
    shift = np.atleast_1d(np.asarray(shift, dtype=float))
    return _single(space, HalfSpaceMotion(0.0, np.eye(space.n - 1), shift), name)


def halfspace_motion(space, log_scale, rot=None, shift=None, name="motion"):
    if space.kind != HYPERBOLIC:
        raise GeometryError("halfspace_motion() needs a hyperbolic space")
    m = space.n - 1
    return _single(
        space,
        HalfSpaceMotion(log_scale, np.eye(m) if rot is None else rot,
                        np.zeros(m) if shift is None else shift),
        name,
    )


def lorentz(space, matrix, name="lorentz"):
    if space.kind != HYPERBOLIC:
        raise GeometryError("lorentz() needs a hyperbolic space")
    return _single(space, LorentzMotion(matrix), name)


def product_isometry(space, *factor_isometries, name=None):
    """Product of factor isometries; ``None`` stands for the identity."""
    blocks = space.blocks
    if len(factor_isometries) != len(blocks):
        raise GeometryError("One factor isometry per factor is required")
    motions = []
    labels = []
    for g, (f, _) in zip(factor_isometries, blocks):
        if g is None:
            motions.append(_identity_motion(f))
            labels.append("id")
            continue
        if g.space != f:
            raise GeometryError(f"Factor isometry acts on {g.space}, not {f}")
        motions.append(g.motions[0])
        labels.append(g.name or "g")
    return Isometry(space, tuple(motions), name or "(" + ",".join(labels) + ")")
