#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Model Hadamard spaces: Euclidean space, hyperbolic space and finite products.

Hyperbolic factors are stored in the upper half-space chart with logarithmic
height. A point of H^n is the chart vector ``(u_1, ..., u_{n-1}, s)`` with
height ``y = exp(s)``; the hyperboloid coordinates (signature ``(+,...,+,-)``,
last coordinate timelike) are the exchange format and are related to the
chart by ``y = 1/(x_{n+1} - x_1)`` and ``u_j = x_{j+1} y``. The chart origin
``(0, ..., 0)`` is the hyperboloid point ``(0, ..., 0, 1)``. All distances,
exponential and logarithm maps below are evaluated in log space so that
radii of several thousands stay finite.

Tangent vectors of a hyperbolic factor are stored in the orthonormal frame
``(y d/du_1, ..., y d/du_{n-1}, y d/dy)``, so the Riemannian inner product is
the plain dot product of components in every model.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GeometryError

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"
PRODUCT = "product"

# hyperbolic boundary points closer than this (radians at the origin) are one point
IDEAL_POINT_TOL = 1e-7
HYPERBOLOID_TOL = 1e-12
LIGHTLIKE_TOL = 1e-10
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ModelSpace:
    """
    A model Hadamard space.

    Use :func:`euclidean`, :func:`hyperbolic` and :func:`product` instead of
    calling the constructor.
    """

    kind: str
    n: int
    factors: tuple = ()

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, HYPERBOLIC, PRODUCT):
            raise GeometryError(f"Unknown model kind '{self.kind}'")
        if self.kind == PRODUCT:
            if len(self.factors) < 1:
                raise GeometryError("A product needs at least one factor")
            for f in self.factors:
                if not isinstance(f, ModelSpace) or f.kind == PRODUCT:
                    raise GeometryError(
                        "Product factors must be euclidean or hyperbolic spaces"
                    )
            if self.n != sum(f.n for f in self.factors):
                raise GeometryError("Product dimension must be the sum of factors")
        elif self.n < 1:
            raise GeometryError(f"Dimension must be positive, got {self.n}")
        elif self.kind == HYPERBOLIC and self.n < 2:
            raise GeometryError("Hyperbolic spaces need dimension at least 2")

    @property
    def dimension(self):
        return self.n

    @cached_property
    def blocks(self):
        """List of ``(factor space, coordinate slice)`` pairs."""
        if self.kind != PRODUCT:
            return [(self, slice(0, self.n))]
        out = []
        start = 0
        for f in self.factors:
            out.append((f, slice(start, start + f.n)))
            start += f.n
        return out

    @property
    def n_factors(self):
        return len(self.blocks)

    def origin(self):
        """The global basepoint ``o``: zero chart coordinates in every factor."""
        return ModelPoint(self, np.zeros(self.n))

    def __str__(self):
        if self.kind == EUCLIDEAN:
            return f"E{self.n}"
        if self.kind == HYPERBOLIC:
            return f"H{self.n}"
        return "x".join(str(f) for f in self.factors)


def euclidean(n):
    return ModelSpace(EUCLIDEAN, int(n))


def hyperbolic(n):
    return ModelSpace(HYPERBOLIC, int(n))


def product(*factors):
    flat = []
    for f in factors:
        flat.extend(f.factors if f.kind == PRODUCT else [f])
    return ModelSpace(PRODUCT, sum(f.n for f in flat), tuple(flat))


def _readonly(a, size=None, name="vector"):
    a = np.array(a, dtype=float).reshape(-1)
    if size is not None and a.shape[0] != size:
        raise GeometryError(f"{name} has length {a.shape[0]}, expected {size}")
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"{name} has non-finite entries: {a}")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ModelPoint:
    """A point of a model space, stored in chart coordinates."""

    space: ModelSpace
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "coords", _readonly(self.coords, self.space.n, "Point")
        )

    def block(self, i):
        return self.coords[self.space.blocks[i][1]]

    def factor(self, i):
        f, sl = self.space.blocks[i]
        return ModelPoint(f, self.coords[sl])

    def hyperboloid(self):
        """Hyperboloid (Minkowski) coordinates, factor by factor."""
        parts = []
        for f, sl in self.space.blocks:
            c = self.coords[sl]
            parts.append(_chart_to_hyperboloid(c) if f.kind == HYPERBOLIC else c)
        return np.concatenate(parts)

    def __repr__(self):
        return f"ModelPoint({self.space}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector in orthonormal frame components."""

    at: ModelPoint
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self,
            "components",
            _readonly(self.components, self.at.space.n, "Tangent vector"),
        )

    def norm(self):
        return float(np.linalg.norm(self.components))

    def inner(self, other):
        _same_base(self, other)
        return float(self.components @ other.components)

    def block(self, i):
        return self.components[self.at.space.blocks[i][1]]

    def __add__(self, other):
        _same_base(self, other)
        return TangentVector(self.at, self.components + other.components)

    def __sub__(self, other):
        _same_base(self, other)
        return TangentVector(self.at, self.components - other.components)

    def __mul__(self, scalar):
        return TangentVector(self.at, float(scalar) * self.components)

    __rmul__ = __mul__

    def __neg__(self):
        return TangentVector(self.at, -self.components)

    def normalized(self):
        nrm = self.norm()
        if nrm == 0.0:
            raise GeometryError("Cannot normalize the zero vector")
        return self * (1.0 / nrm)

    def hyperboloid(self):
        """
        The same vector in ambient Minkowski (hyperbolic factors) or
        Euclidean coordinates; Minkowski-orthogonal to the hyperboloid point.
        """
        parts = []
        for i, (f, sl) in enumerate(self.at.space.blocks):
            w = self.components[sl]
            if f.kind == HYPERBOLIC:
                parts.append(w @ _chart_frame(self.at.coords[sl]))
            else:
                parts.append(w)
        return np.concatenate(parts)


def _same_base(v, w):
    if v.at.space != w.at.space or not np.array_equal(v.at.coords, w.at.coords):
        raise GeometryError("Tangent vectors live at different points")


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """
    A point of the boundary at infinity.

    ``weights`` has one entry per factor with unit Euclidean norm (the join
    weights; a two-factor product has ``weights = (cos theta, sin theta)``).
    ``directions`` holds one unit vector per factor, ``None`` where the weight
    vanishes: the direction itself for Euclidean factors, and for hyperbolic
    factors the spatial part ``v`` of the lightlike vector ``(v, 1)`` which is
    normalized against the origin, ``<(v, 1), o> = -1``.
    """

    space: ModelSpace
    weights: np.ndarray
    directions: tuple

    def __post_init__(self):
        blocks = self.space.blocks
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != len(blocks) or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise GeometryError(f"Invalid join weights {w}")
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            raise GeometryError("Join weights vanish")
        w = w / nrm
        if len(self.directions) != len(blocks):
            raise GeometryError("One direction per factor is required")
        dirs = []
        for wi, d, (f, sl) in zip(w, self.directions, blocks):
            if wi == 0.0:
                dirs.append(None)
                continue
            if d is None:
                raise GeometryError("A factor with positive weight needs a direction")
            d = np.array(d, dtype=float).reshape(-1)
            if d.shape[0] != f.n:
                raise GeometryError(
                    f"Factor direction has length {d.shape[0]}, expected {f.n}"
                )
            dn = np.linalg.norm(d)
            if dn == 0.0 or not np.isfinite(dn):
                raise GeometryError("Boundary direction must be a nonzero vector")
            d = d / dn
            d.flags.writeable = False
            dirs.append(d)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "directions", tuple(dirs))

    @property
    def theta(self):
        """Join angle for two-factor products."""
        if len(self.weights) != 2:
            raise GeometryError("theta is only defined for two-factor products")
        return math.atan2(self.weights[1], self.weights[0])

    def factor(self, i):
        f, _ = self.space.blocks[i]
        if self.directions[i] is None:
            return None
        return BoundaryPoint(f, np.ones(1), (self.directions[i],))

    def lightlike(self, i=0):
        """Lightlike representative ``(v, 1)`` of a hyperbolic factor."""
        d = self.directions[i]
        if d is None:
            return None
        return np.concatenate([d, [1.0]])

    def __repr__(self):
        parts = []
        for w, d in zip(self.weights, self.directions):
            parts.append("-" if d is None else np.array2string(d, precision=6))
        return f"BoundaryPoint({self.space}, w={np.array2string(self.weights, precision=6)}, {', '.join(parts)})"


def boundary_point(space, direction):
    """
    Boundary point of a Euclidean or hyperbolic space.

    Parameters
    ----------
    space : ModelSpace
        A non-product space.
    direction : array_like
        Euclidean: a nonzero direction. Hyperbolic: either the unit vector
        ``v`` seen from the origin or a lightlike vector of length ``n+1``
        with positive time coordinate.

    Returns
    -------
    BoundaryPoint
    """
    if space.kind == PRODUCT:
        raise GeometryError("Use join() for boundary points of products")
    d = np.array(direction, dtype=float).reshape(-1)
    if space.kind == HYPERBOLIC and d.shape[0] == space.n + 1:
        if d[-1] <= 0.0:
            raise GeometryError("Lightlike vector needs a positive time coordinate")
        d = d / d[-1]
        if abs(minkowski_dot(d, d)) > LIGHTLIKE_TOL:
            raise GeometryError(f"Vector {direction} is not lightlike")
        d = d[:-1]
    return BoundaryPoint(space, np.ones(1), (d,))


def ideal_point(space, beta=None):
    """
    Hyperbolic boundary point at chart position ``beta`` (``None`` means the
    chart's point at infinity).
    """
    if space.kind != HYPERBOLIC:
        raise GeometryError("ideal_point() needs a hyperbolic space")
    if beta is None:
        v = np.zeros(space.n)
        v[0] = 1.0
    else:
        v = _v_from_beta(np.array(beta, dtype=float).reshape(-1))
    return BoundaryPoint(space, np.ones(1), (v,))


def join(space, factor_points, weights=None, theta=None):
    """
    Join boundary point of a product.

    :param factor_points: one BoundaryPoint (or None) per factor
    :param weights: join weights, normalized to unit length
    :param theta: shorthand for two factors, ``weights = (cos, sin)``
    """
    if space.kind != PRODUCT:
        raise GeometryError("join() needs a product space")
    if theta is not None:
        if len(space.blocks) != 2:
            raise GeometryError("theta needs exactly two factors")
        if not (-1e-15 <= theta <= math.pi / 2 + 1e-15):
            raise ValueError(f"Input Error: theta={theta} outside [0, pi/2]")
        theta = min(max(theta, 0.0), math.pi / 2)
        c, s = math.cos(theta), math.sin(theta)
        weights = [c if c > 1e-16 else 0.0, s if s > 1e-16 else 0.0]
    if weights is None:
        raise ValueError("Input Error: join() needs weights or theta")
    dirs = []
    for w, p, (f, _) in zip(weights, factor_points, space.blocks):
        if w == 0.0 or p is None:
            dirs.append(None)
            continue
        if p.space != f:
            raise GeometryError(f"Factor boundary point lives in {p.space}, not {f}")
        dirs.append(p.directions[0])
    w = [0.0 if d is None else wi for wi, d in zip(weights, dirs)]
    return BoundaryPoint(space, np.array(w, dtype=float), tuple(dirs))


# ---------------------------------------------------------------------------
# Minkowski and half-space helpers
# ---------------------------------------------------------------------------


def minkowski_dot(a, b):
    """Minkowski form with signature (+,...,+,-)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(a[:-1] @ b[:-1] - a[-1] * b[-1])


def _log_sinh(x):
    """log(sinh(x)) for x > 0 without overflow."""
    if x > 20.0:
        return x - LOG2 + math.log1p(-math.exp(-2.0 * x))
    return math.log(math.sinh(x))


def _log_cosh(x):
    x = abs(x)
    return x - LOG2 + math.log1p(math.exp(-2.0 * x))


def _safe_log(x):
    return math.log(x) if x > 0.0 else -math.inf


def _chart_to_hyperboloid(c):
    u, s = c[:-1], c[-1]
    uu = float(u @ u)
    e = math.exp(-s)
    x1 = math.sinh(s) + 0.5 * uu * e
    t = math.cosh(s) + 0.5 * uu * e
    return np.concatenate([[x1], u * e, [t]])


def _hyperboloid_to_chart(x):
    x = np.asarray(x, dtype=float)
    sp = x[:-1]
    t = x[-1]
    if t <= 0.0:
        raise GeometryError("Hyperboloid point needs a positive time coordinate")
    if abs(minkowski_dot(x, x) + 1.0) > HYPERBOLOID_TOL:
        t = math.sqrt(1.0 + float(sp @ sp))
    x1 = sp[0]
    rest = sp[1:]
    if x1 >= 0.0:
        denom = (1.0 + float(rest @ rest)) / (t + x1)
    else:
        denom = t - x1
    return np.concatenate([rest / denom, [-math.log(denom)]])


def _chart_frame(c):
    """Rows: hyperboloid images of the orthonormal frame at chart point c."""
    u, s = c[:-1], c[-1]
    y = math.exp(s)
    m = u.shape[0]
    uu = float(u @ u)
    frame = np.zeros((m + 1, m + 2))
    for j in range(m):
        frame[j, 0] = u[j]
        frame[j, 1 + j] = 1.0
        frame[j, -1] = u[j]
    frame[m, 0] = (y * y - uu + 1.0) / (2.0 * y)
    frame[m, 1:-1] = -u / y
    frame[m, -1] = (y * y - 1.0 - uu) / (2.0 * y)
    return frame


def _v_from_beta(beta):
    bb = float(beta @ beta)
    return np.concatenate([[(bb - 1.0) / (bb + 1.0)], 2.0 * beta / (bb + 1.0)])


def _beta_from_v(v):
    """Chart position of the ideal point with direction v; None for infinity."""
    v1 = v[0]
    rest = v[1:]
    rr = float(rest @ rest)
    one_minus = rr / (1.0 + v1) if v1 > 0.0 else 1.0 - v1
    if one_minus <= 1e-300 or (rr == 0.0 and v1 > 0.0):
        return None
    return rest / one_minus


def _hyp_distance(p, q):
    du = p[:-1] - q[:-1]
    ds = abs(p[-1] - q[-1])
    a = 2.0 * _log_sinh(0.5 * ds) if ds > 0.0 else -math.inf
    nu = float(np.linalg.norm(du))
    b = 2.0 * math.log(nu) - (p[-1] + q[-1]) - 2.0 * LOG2 if nu > 0.0 else -math.inf
    log_x = np.logaddexp(a, b)
    if log_x == -math.inf:
        return 0.0
    if log_x > 60.0:
        return float(log_x + 2.0 * LOG2)
    return 2.0 * math.asinh(math.exp(0.5 * log_x))


def _recenter(p, q):
    """Chart coordinates of q after the similarity moving p to the origin."""
    e = math.exp(-p[-1])
    return np.concatenate([(q[:-1] - p[:-1]) * e, [q[-1] - p[-1]]])


def _uncenter(p, c):
    return np.concatenate([p[:-1] + c[:-1] * math.exp(p[-1]), [c[-1] + p[-1]]])


def _hyp_log(p, q):
    """Frame components at p of log_p(q)."""
    c = _recenter(p, q)
    d = _hyp_distance(np.zeros_like(c), c)
    if d == 0.0:
        return np.zeros_like(c)
    u, s = c[:-1], c[-1]
    nu = float(np.linalg.norm(u))
    lu = 2.0 * math.log(nu) - s - LOG2 if nu > 0.0 else -math.inf
    log_t = np.logaddexp(_log_cosh(s), lu)
    if s != 0.0:
        a = math.copysign(math.exp(_log_sinh(abs(s)) - log_t), s)
    else:
        a = 0.0
    b = math.exp(lu - log_t) if nu > 0.0 else 0.0
    w = np.concatenate([u * math.exp(-s - log_t), [a + b]])
    return d * w / np.linalg.norm(w)


def _one_minus_plus(ws, wu_sq):
    """(1 - ws, 1 + ws) for a unit vector with vertical part ws, no cancellation."""
    if ws > 0.0:
        return wu_sq / (1.0 + ws), 1.0 + ws
    return 1.0 - ws, wu_sq / (1.0 - ws) if ws < 0.0 else 1.0


def _hyp_exp(p, w):
    t = float(np.linalg.norm(w))
    if t == 0.0:
        return np.array(p, dtype=float)
    wh = w / t
    wu, ws = wh[:-1], wh[-1]
    om, op = _one_minus_plus(ws, float(wu @ wu))
    s = -float(
        np.logaddexp(t + _safe_log(0.5 * om), -t + _safe_log(0.5 * op))
    )
    u = wu * math.exp(_log_sinh(t) + s)
    return _uncenter(p, np.concatenate([u, [s]]))


def _hyp_transport(p, w, q):
    """Parallel transport of frame components w from p to q."""
    if not np.any(w):
        return np.zeros_like(w)
    c = _recenter(p, q)
    if not np.any(c):
        return np.array(w, dtype=float)
    o = np.zeros(c.shape[0] + 1)
    o[-1] = 1.0
    y = _chart_to_hyperboloid(c)
    v = w @ _chart_frame(np.zeros_like(c))
    pv = v + minkowski_dot(y, v) / (1.0 - minkowski_dot(o, y)) * (o + y)
    frame = _chart_frame(c)
    return np.array([minkowski_dot(pv, f) for f in frame])


def _hyp_direction_to(p, v):
    """Unit frame vector at p pointing to the ideal point with direction v."""
    beta = _beta_from_v(v)
    m = p.shape[0] - 1
    if beta is None:
        out = np.zeros(m + 1)
        out[-1] = 1.0
        return out
    delta = (p[:-1] - beta) * math.exp(-p[-1])
    r2 = float(delta @ delta)
    return -np.concatenate([2.0 * delta / (1.0 + r2), [(1.0 - r2) / (1.0 + r2)]])


def _hyp_busemann(p, v):
    """Busemann function of the ideal point v, normalized at the origin."""
    beta = _beta_from_v(v)
    if beta is None:
        return -float(p[-1])
    delta = (p[:-1] - beta) * math.exp(-p[-1])
    r = float(np.linalg.norm(delta))
    lr = float(np.logaddexp(0.0, 2.0 * math.log(r))) if r > 0.0 else 0.0
    return float(p[-1]) + lr - math.log1p(float(beta @ beta))


def _hyp_endpoint(p, w):
    """Ideal point direction v reached by the ray exp_p(t w)."""
    wh = w / np.linalg.norm(w)
    wu, ws = wh[:-1], wh[-1]
    om, _ = _one_minus_plus(ws, float(wu @ wu))
    if om <= 0.0 or not np.any(wu):
        if ws > 0.0:
            v = np.zeros(w.shape[0])
            v[0] = 1.0
            return v
    beta = p[:-1] + math.exp(p[-1]) * wu / om
    return _v_from_beta(beta)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def _check_same(*objs):
    space = objs[0].space if not isinstance(objs[0], TangentVector) else objs[0].at.space
    for o in objs[1:]:
        other = o.at.space if isinstance(o, TangentVector) else o.space
        if other != space:
            raise GeometryError(f"Mismatched spaces: {space} vs {other}")
    return space


def point_from_hyperboloid(space, coords):
    """
    Build a point from hyperboloid coordinates (hyperbolic factors use
    ``n+1`` entries, Euclidean factors ``n``), renormalizing onto the
    hyperboloid when ``<x,x>`` drifted from -1 by more than 1e-12.
    """
    coords = np.array(coords, dtype=float).reshape(-1)
    parts = []
    start = 0
    for f, _ in space.blocks:
        size = f.n + 1 if f.kind == HYPERBOLIC else f.n
        block = coords[start : start + size]
        if block.shape[0] != size:
            raise GeometryError("Hyperboloid coordinates have the wrong length")
        parts.append(_hyperboloid_to_chart(block) if f.kind == HYPERBOLIC else block)
        start += size
    if start != coords.shape[0]:
        raise GeometryError("Hyperboloid coordinates have the wrong length")
    return ModelPoint(space, np.concatenate(parts))


def half_space_point(space, u, height):
    """Point of H^n at horizontal position u and height y > 0."""
    if space.kind != HYPERBOLIC:
        raise GeometryError("half_space_point() needs a hyperbolic space")
    if height <= 0.0:
        raise ValueError(f"Input Error: height must be positive, got {height}")
    return ModelPoint(space, np.concatenate([np.atleast_1d(u), [math.log(height)]]))


def distance(p, q):
    """Riemannian distance; the product metric is the l2 combination of factors."""
    space = _check_same(p, q)
    ds = []
    for f, sl in space.blocks:
        a, b = p.coords[sl], q.coords[sl]
        if f.kind == HYPERBOLIC:
            ds.append(_hyp_distance(a, b))
        else:
            ds.append(float(np.linalg.norm(a - b)))
    return math.hypot(*ds)


def factor_distances(p, q):
    _check_same(p, q)
    return [distance(p.factor(i), q.factor(i)) for i in range(p.space.n_factors)]


def exp_map(v):
    """Riemannian exponential of the tangent vector v at v.at."""
    x = v.at
    parts = []
    for f, sl in x.space.blocks:
        c, w = x.coords[sl], v.components[sl]
        parts.append(_hyp_exp(c, w) if f.kind == HYPERBOLIC else c + w)
    return ModelPoint(x.space, np.concatenate(parts))


def log_map(x, y):
    """Tangent vector at x pointing to y with length d(x, y)."""
    space = _check_same(x, y)
    parts = []
    for f, sl in space.blocks:
        a, b = x.coords[sl], y.coords[sl]
        parts.append(_hyp_log(a, b) if f.kind == HYPERBOLIC else b - a)
    return TangentVector(x, np.concatenate(parts))


def geodesic(x, y, s):
    """Point at fraction s of the geodesic segment [x, y]."""
    if s == 0.0:
        return x
    return exp_map(log_map(x, y) * s)


def parallel_transport(v, y):
    """Transport v along the geodesic from v.at to y."""
    x = v.at
    space = _check_same(x, y)
    parts = []
    for f, sl in space.blocks:
        w = v.components[sl]
        if f.kind == HYPERBOLIC:
            parts.append(_hyp_transport(x.coords[sl], w, y.coords[sl]))
        else:
            parts.append(np.array(w))
    return TangentVector(y, np.concatenate(parts))


def direction_to(x, xi):
    """Unit initial tangent of the ray [x, xi)."""
    space = _check_same(x, xi)
    parts = []
    for w, d, (f, sl) in zip(xi.weights, xi.directions, space.blocks):
        if d is None:
            parts.append(np.zeros(f.n))
        elif f.kind == HYPERBOLIC:
            parts.append(w * _hyp_direction_to(x.coords[sl], d))
        else:
            parts.append(w * d)
    return TangentVector(x, np.concatenate(parts))


def geodesic_ray(x, xi, t):
    """
    Point at distance t along the unit speed ray from x to xi.

    Factor i advances by ``w_i t``; rays to the chart point at infinity move
    vertically in closed form.
    """
    if t < 0.0:
        raise ValueError(f"Input Error: ray parameter must be nonnegative, got {t}")
    space = _check_same(x, xi)
    parts = []
    for w, d, (f, sl) in zip(xi.weights, xi.directions, space.blocks):
        c = x.coords[sl]
        if d is None or t == 0.0:
            parts.append(np.array(c))
        elif f.kind == HYPERBOLIC:
            if _beta_from_v(d) is None:
                parts.append(np.concatenate([c[:-1], [c[-1] + w * t]]))
            else:
                parts.append(_hyp_exp(c, w * t * _hyp_direction_to(c, d)))
        else:
            parts.append(c + w * t * d)
    return ModelPoint(space, np.concatenate(parts))


def vector_angle(a, b):
    """Angle between two nonzero vectors, accurate near 0 and pi."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return 2.0 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b))


def angle_at(x, xi, eta):
    """Riemannian angle at x between the rays [x, xi) and [x, eta)."""
    _check_same(x, xi, eta)
    return vector_angle(direction_to(x, xi).components, direction_to(x, eta).components)


def angle_between_points(x, p, q):
    """Angle at x between the geodesic segments [x, p] and [x, q]."""
    a = log_map(x, p).components
    b = log_map(x, q).components
    if not np.any(a) or not np.any(b):
        return 0.0
    return vector_angle(a, b)


def _factor_tits(f, a, b):
    angle = vector_angle(a, b)
    if f.kind == HYPERBOLIC:
        return 0.0 if angle < IDEAL_POINT_TOL else math.pi
    return angle


def tits_distance(xi, eta):
    """
    Tits distance, capped at pi.

    Hyperbolic factors are discrete (0 or pi); products combine factors by the
    spherical join formula ``cos Td = sum_i w_i w'_i cos(min(Td_i, pi))``.
    """
    space = _check_same(xi, eta)
    c = 0.0
    for wi, wj, a, b, (f, _) in zip(
        xi.weights, eta.weights, xi.directions, eta.directions, space.blocks
    ):
        if a is None or b is None:
            continue
        c += wi * wj * math.cos(min(_factor_tits(f, a, b), math.pi))
    return math.acos(min(1.0, max(-1.0, c)))


def boundary_from_direction(v):
    """Endpoint at infinity of the ray t -> exp(t v)."""
    x = v.at
    comps = v.components
    nrm = np.linalg.norm(comps)
    if nrm == 0.0:
        raise GeometryError("The zero vector has no endpoint")
    weights = []
    dirs = []
    for f, sl in x.space.blocks:
        w = comps[sl] / nrm
        wn = float(np.linalg.norm(w))
        weights.append(wn)
        if wn == 0.0:
            dirs.append(None)
        elif f.kind == HYPERBOLIC:
            dirs.append(_hyp_endpoint(x.coords[sl], w))
        else:
            dirs.append(w / wn)
    return BoundaryPoint(x.space, np.array(weights), tuple(dirs))


def _householder_to_e1(v):
    """Orthogonal matrix Q with Q v = e_1 for a unit vector v."""
    n = v.shape[0]
    e1 = np.zeros(n)
    e1[0] = 1.0
    h = v - e1
    hn = np.linalg.norm(h)
    if hn < 1e-15:
        return np.eye(n)
    h = h / hn
    return np.eye(n) - 2.0 * np.outer(h, h)


def tits_distance_limit(xi, eta, times=(1e3, 1e4, 1e5, 1e6)):
    """
    Limit oracle ``sin(angle/2) = lim d(r_xi(t), r_eta(t)) / 2t`` from the
    origin, Richardson-extrapolated over the last two times.

    Each hyperbolic factor is rotated about the origin so that xi's endpoint is
    the chart's point at infinity, which keeps the distances exact at large t.
    """
    space = _check_same(xi, eta)
    dirs_xi = []
    dirs_eta = []
    for a, b, (f, _) in zip(xi.directions, eta.directions, space.blocks):
        if f.kind == HYPERBOLIC:
            ref = a if a is not None else b
            q = _householder_to_e1(ref) if ref is not None else np.eye(f.n)
            dirs_xi.append(None if a is None else q @ a)
            dirs_eta.append(None if b is None else q @ b)
        else:
            dirs_xi.append(a)
            dirs_eta.append(b)
    xr = BoundaryPoint(space, xi.weights, tuple(dirs_xi))
    er = BoundaryPoint(space, eta.weights, tuple(dirs_eta))
    o = space.origin()
    ratios = []
    for t in times:
        ratios.append(distance(geodesic_ray(o, xr, t), geodesic_ray(o, er, t)) / (2.0 * t))
    t1, t2 = times[-2], times[-1]
    limit = (t2 * ratios[-1] - t1 * ratios[-2]) / (t2 - t1)
    return 2.0 * math.asin(min(1.0, max(0.0, limit)))


def random_point(space, rng, scale=1.0):
    """Random point within roughly ``scale`` of the origin."""
    parts = []
    for f, _ in space.blocks:
        if f.kind == HYPERBOLIC:
            w = rng.normal(size=f.n)
            w *= scale * rng.uniform() / max(np.linalg.norm(w), 1e-300)
            parts.append(_hyp_exp(np.zeros(f.n), w))
        else:
            parts.append(scale * rng.normal(size=f.n))
    return ModelPoint(space, np.concatenate(parts))


def random_tangent(x, rng, scale=1.0):
    return TangentVector(x, scale * rng.normal(size=x.space.n))


def random_boundary_point(space, rng):
    dirs = []
    for f, _ in space.blocks:
        d = rng.normal(size=f.n)
        dirs.append(d / np.linalg.norm(d))
    weights = np.abs(rng.normal(size=len(dirs)))
    return BoundaryPoint(space, weights, tuple(dirs))
