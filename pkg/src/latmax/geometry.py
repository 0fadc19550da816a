"""Exact convex geometry in dimensions two and three.

Coordinates are Python ints or :class:`fractions.Fraction` values; nothing on
the computation path ever touches a float. Integral coordinates are kept as
plain ints (``Fraction(3, 1)`` is normalised to ``3``) so that integral
polytopes run on integer arithmetic throughout.

Polytopes are immutable. Vertices are stored in lexicographic order, so two
polytopes describe the same set exactly when their vertex tuples are equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

Rat = Union[int, Fraction]
Point = tuple  # tuple of Rat, length 2 or 3

# int64 kernels are exact below this coordinate bound (|entries| < 48 * M**3).
_INT64_COORD_LIMIT = 100_000


def rat(x) -> Rat:
    """Normalise ``x`` to an int when integral, otherwise to a Fraction."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return rat(Fraction(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    raise TypeError(f"refusing non-exact coordinate {x!r}")


def as_point(p: Iterable) -> Point:
    return tuple(rat(c) for c in p)


def _denominator(x: Rat) -> int:
    return 1 if isinstance(x, int) else x.denominator


def _lcm_denominator(points: Iterable[Point]) -> int:
    den = 1
    for p in points:
        for c in p:
            if not isinstance(c, int):
                den = math.lcm(den, c.denominator)
    return den


def _scale_to_int(points: Sequence[Point], den: int) -> list[tuple[int, ...]]:
    if den == 1:
        return [tuple(p) for p in points]
    return [tuple(int(c * den) for c in p) for p in points]


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = reduce(math.gcd, (abs(c) for c in v), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(c // g for c in v)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Point:
    return tuple(rat(a - b) for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> Point:
    return tuple(rat(a + b) for a, b in zip(u, v))


def scale(t: Rat, v: Sequence) -> Point:
    return tuple(rat(t * a) for a in v)


def cross(u: Sequence, v: Sequence) -> tuple:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def det3(a: Sequence, b: Sequence, c: Sequence):
    return dot(a, cross(b, c))


def affine_dimension(points: Sequence[Point]) -> int:
    """Dimension of the affine hull of a nonempty point list (exact)."""
    if not points:
        return -1
    p0 = points[0]
    basis: list[list[Fraction]] = []
    for p in points[1:]:
        vec = [Fraction(a - b) for a, b in zip(p, p0)]
        for row in basis:
            lead = next(i for i, c in enumerate(row) if c != 0)
            if vec[lead] != 0:
                f = vec[lead] / row[lead]
                vec = [a - f * b for a, b in zip(vec, row)]
        if any(vec):
            basis.append(vec)
    return len(basis)


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace ``<normal, x> <= offset`` with a primitive integer normal."""

    normal: tuple[int, ...]
    offset: Rat

    def value(self, x: Sequence) -> Rat:
        return dot(self.normal, x)

    def contains(self, x: Sequence) -> bool:
        return dot(self.normal, x) <= self.offset

    def strictly_contains(self, x: Sequence) -> bool:
        return dot(self.normal, x) < self.offset

    def on_boundary(self, x: Sequence) -> bool:
        return dot(self.normal, x) == self.offset


# --------------------------------------------------------------------------
# 2D hull


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(points: list) -> list:
    """Counter-clockwise strict hull (no collinear points) of sorted unique points."""
    if len(points) <= 2:
        return list(points)
    lower: list = []
    for p in points:
        while len(lower) >= 2 and _cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(points):
        while len(upper) >= 2 and _cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _edge_halfspace(p, q) -> Halfspace:
    """Outward halfspace for the counter-clockwise edge p -> q."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    den = math.lcm(_denominator(dx), _denominator(dy))
    nx, ny = primitive((int(dy * den), int(-dx * den)))
    return Halfspace((nx, ny), rat(nx * p[0] + ny * p[1]))


# --------------------------------------------------------------------------
# 3D hull


@lru_cache(maxsize=None)
def _triples(n: int) -> np.ndarray:
    return np.array(list(combinations(range(n), 3)), dtype=np.intp).reshape(-1, 3)


def _int_hull3(pts: list[tuple[int, int, int]]) -> tuple[list[int], list[tuple[tuple[int, int, int], int]]]:
    """Facets of the hull of full-dimensional unique integer points.

    Every facet plane passes through three of the input points, so scanning
    all triples and keeping the planes with every point on one side finds all
    facets. Returns (vertex indices, sorted list of (primitive normal, offset)).
    """
    bound = max(abs(c) for p in pts for c in p)
    dtype = np.int64 if bound <= _INT64_COORD_LIMIT else object
    P = np.array(pts, dtype=dtype)
    tri = _triples(len(pts))
    A = P[tri[:, 0]]
    N = np.cross(P[tri[:, 1]] - A, P[tri[:, 2]] - A)
    if dtype is object:
        N = N.astype(object)
    S = N @ P.T - (N * A).sum(axis=1)[:, None]
    upper = ~(S > 0).any(axis=1)
    lower = ~(S < 0).any(axis=1)
    keep = (upper | lower) & (N != 0).any(axis=1)
    N = N[keep]
    N = np.where(upper[keep][:, None], N, -N)
    if dtype is object:
        g = np.array([reduce(math.gcd, (abs(int(c)) for c in row)) for row in N], dtype=object)
    else:
        g = np.gcd.reduce(np.abs(N), axis=1)
    N = N // g[:, None]
    A = A[keep]
    off = (N * A).sum(axis=1)
    planes = sorted({(tuple(int(c) for c in n), int(b)) for n, b in zip(N, off)})
    verts = []
    for i, p in enumerate(pts):
        tight = [n for (n, b) in planes if dot(n, p) == b]
        if len(tight) >= 3 and _rank3(tight):
            verts.append(i)
    return verts, planes


def _rank3(vectors: list) -> bool:
    for a, b, c in combinations(vectors, 3):
        if det3(a, b, c) != 0:
            return True
    return False


# --------------------------------------------------------------------------
# Polytope


@dataclass(frozen=True)
class Polytope:
    """Convex hull of finitely many rational points in R^2 or R^3.

    ``vertices`` is irredundant and sorted lexicographically. ``facets`` is the
    irredundant H-representation when the polytope is full-dimensional and is
    empty otherwise. The empty set has no vertices and ``dim == -1``.
    """

    vertices: tuple[Point, ...]
    facets: tuple[Halfspace, ...]
    dim: int
    ambient: int = field(default=3)

    def __repr__(self) -> str:
        vs = ", ".join("(" + ",".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope[{self.dim}D]({vs})"

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def full_dimensional(self) -> bool:
        return self.dim == self.ambient

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, int) for v in self.vertices for c in v)

    def contains(self, x: Sequence) -> bool:
        if self.full_dimensional:
            return all(f.contains(x) for f in self.facets)
        if self.is_empty:
            return False
        x = as_point(x)
        return hull(self.vertices + (x,)).vertices == self.vertices

    def interior_contains(self, x: Sequence) -> bool:
        return self.full_dimensional and all(f.strictly_contains(x) for f in self.facets)

    def contains_polytope(self, other: "Polytope") -> bool:
        return all(self.contains(v) for v in other.vertices)

    def facet_vertices(self, i: int) -> tuple[Point, ...]:
        f = self.facets[i]
        return tuple(v for v in self.vertices if f.on_boundary(v))

    def bounding_box(self) -> tuple[tuple[Rat, ...], tuple[Rat, ...]]:
        lo = tuple(min(v[k] for v in self.vertices) for k in range(self.ambient))
        hi = tuple(max(v[k] for v in self.vertices) for k in range(self.ambient))
        return lo, hi

    @cached_property
    def integer_vertex_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=np.int64)


Polygon = Polytope


def empty_polytope(ambient: int) -> Polytope:
    return Polytope((), (), -1, ambient)


def hull(points: Iterable[Sequence]) -> Polytope:
    """Convex hull of a nonempty list of 2D or 3D points.

    Degenerate inputs give lower-dimensional results (vertex list only).
    """
    pts = sorted({as_point(p) for p in points})
    if not pts:
        raise ValueError("hull of an empty point set")
    d = len(pts[0])
    if d == 2:
        return _hull2(pts)
    if d == 3:
        return _hull3(pts)
    raise ValueError(f"unsupported ambient dimension {d}")


def _hull2(pts: list) -> Polytope:
    if len(pts) == 1:
        return Polytope((pts[0],), (), 0, 2)
    ring = _monotone_chain(pts)
    if len(ring) == 2 or all(_cross2(pts[0], pts[-1], p) == 0 for p in pts):
        return Polytope((pts[0], pts[-1]), (), 1, 2)
    facets = tuple(_edge_halfspace(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring)))
    return Polytope(tuple(sorted(ring)), facets, 2, 2)


def _hull3(pts: list) -> Polytope:
    if len(pts) == 1:
        return Polytope((pts[0],), (), 0, 3)
    dim = affine_dimension(pts)
    if dim == 1:
        return Polytope((pts[0], pts[-1]), (), 1, 3)
    if dim == 2:
        return Polytope(tuple(sorted(_planar_vertices(pts))), (), 2, 3)
    den = _lcm_denominator(pts)
    ipts = _scale_to_int(pts, den)
    vidx, planes = _int_hull3(ipts)
    facets = tuple(Halfspace(n, rat(Fraction(b, den))) for n, b in planes)
    return Polytope(tuple(pts[i] for i in vidx), facets, 3, 3)


def _planar_vertices(pts: list) -> list:
    """Vertices of a planar point set in R^3, via a coordinate projection."""
    p0 = pts[0]
    normal = None
    for a, b in combinations(pts[1:], 2):
        n = cross(sub(a, p0), sub(b, p0))
        if any(n):
            normal = n
            break
    drop = next(k for k in range(3) if normal[k] != 0)
    keep = [k for k in range(3) if k != drop]
    lift = {(p[keep[0]], p[keep[1]]): p for p in pts}
    ring = _monotone_chain(sorted(lift))
    return [lift[q] for q in ring]


def polygon_ring(P: Polytope) -> list[Point]:
    """Vertices of a 2D polygon in counter-clockwise order."""
    return _monotone_chain(list(P.vertices))


# --------------------------------------------------------------------------
# Measures


def _area2(ring: Sequence) -> Rat:
    s = 0
    for i in range(len(ring)):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % len(ring)]
        s += x0 * y1 - x1 * y0
    return rat(Fraction(s) / 2)


def area(Q: Polytope) -> Rat:
    if Q.ambient != 2:
        raise ValueError("area() expects a polygon")
    if Q.dim < 2:
        return 0
    return abs(_area2(polygon_ring(Q)))


def volume(P: Polytope) -> Rat:
    """Exact volume as a sum of pyramids over the facets from the first vertex.

    The pyramid over facet F with apex v0 has volume
    (b_F - <n_F, v0>) * area_k(F) / (3 |n_k|), where area_k is the area of the
    projection of F onto the coordinate plane orthogonal to e_k.
    """
    if P.ambient != 3 or P.dim < 3:
        raise ValueError("volume() needs a full-dimensional 3D polytope")
    v0 = P.vertices[0]
    total = Fraction(0)
    for i, f in enumerate(P.facets):
        h = f.offset - dot(f.normal, v0)
        if h == 0:
            continue
        k = next(j for j in range(3) if f.normal[j] != 0)
        keep = [j for j in range(3) if j != k]
        proj = sorted({(v[keep[0]], v[keep[1]]) for v in P.facet_vertices(i)})
        a = abs(_area2(_monotone_chain(proj)))
        total += Fraction(h) * a / (3 * abs(f.normal[k]))
    return rat(total)


def difference_body(P: Polytope) -> Polytope:
    if P.is_empty:
        raise ValueError("difference body of the empty set")
    return hull(sub(v, w) for v in P.vertices for w in P.vertices)


def support(P: Polytope, u: Sequence[int]) -> Rat:
    return max(dot(u, v) for v in P.vertices)


def width_in_direction(P: Polytope, u: Sequence[int]) -> Rat:
    return support(P, u) + support(P, tuple(-c for c in u))


def dilate(P: Polytope, t: Rat, center: Sequence | None = None) -> Polytope:
    """The homothet ``t * P + (1 - t) * center`` (``center`` defaults to o)."""
    if center is None:
        return hull(scale(t, v) for v in P.vertices)
    c = as_point(center)
    return hull(add(scale(t, v), scale(1 - t, c)) for v in P.vertices)


def translate(P: Polytope, t: Sequence) -> Polytope:
    return hull(add(v, t) for v in P.vertices)


def vertex_barycenter(P: Polytope) -> Point:
    n = len(P.vertices)
    return tuple(rat(Fraction(sum(v[k] for v in P.vertices), n)) for k in range(P.ambient))


def slice_at_height(P: Polytope, t: Rat) -> Polytope:
    """``{x in R^2 : (x, t) in P}`` as a polygon (possibly empty or degenerate)."""
    t = rat(t)
    pts = []
    below = [v for v in P.vertices if v[2] < t]
    above = [v for v in P.vertices if v[2] > t]
    pts.extend((v[0], v[1]) for v in P.vertices if v[2] == t)
    for p in below:
        for q in above:
            s = Fraction(t - p[2]) / (q[2] - p[2])
            pts.append((rat(p[0] + s * (q[0] - p[0])), rat(p[1] + s * (q[1] - p[1]))))
    if not pts:
        return empty_polytope(2)
    return hull(pts)


def minkowski_sum_2d(A: Polytope, B: Polytope) -> Polytope:
    if A.is_empty or B.is_empty:
        raise ValueError("Minkowski sum with the empty set")
    return hull(add(a, b) for a in A.vertices for b in B.vertices)


# --------------------------------------------------------------------------
# Unimodular maps


def _det(m: Sequence[Sequence[int]]) -> int:
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return det3(m[0], m[1], m[2])


@dataclass(frozen=True)
class AffineUnimodularMap:
    """``x -> matrix @ x + translation`` with an integer matrix of determinant +-1."""

    matrix: tuple[tuple[int, ...], ...]
    translation: tuple[int, ...]

    def __post_init__(self):
        m = tuple(tuple(int(c) for c in row) for row in self.matrix)
        t = tuple(int(c) for c in self.translation)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", t)
        if len(t) != len(m) or any(len(row) != len(m) for row in m):
            raise ValueError("matrix and translation sizes disagree")
        if abs(_det(m)) != 1:
            raise ValueError(f"matrix is not unimodular (det = {_det(m)})")

    @classmethod
    def identity(cls, d: int = 3) -> "AffineUnimodularMap":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)), (0,) * d)

    @classmethod
    def translation_by(cls, t: Sequence[int]) -> "AffineUnimodularMap":
        d = len(t)
        return cls(cls.identity(d).matrix, tuple(t))

    @property
    def dim(self) -> int:
        return len(self.translation)

    @property
    def det(self) -> int:
        return _det(self.matrix)

    def __call__(self, x: Sequence) -> Point:
        return tuple(rat(dot(row, x) + t) for row, t in zip(self.matrix, self.translation))

    def compose(self, other: "AffineUnimodularMap") -> "AffineUnimodularMap":
        """``self o other``."""
        d = self.dim
        m = tuple(
            tuple(sum(self.matrix[i][k] * other.matrix[k][j] for k in range(d)) for j in range(d))
            for i in range(d)
        )
        t = tuple(dot(self.matrix[i], other.translation) + self.translation[i] for i in range(d))
        return AffineUnimodularMap(m, t)

    def inverse(self) -> "AffineUnimodularMap":
        inv = _integer_inverse(self.matrix)
        t = tuple(-dot(row, self.translation) for row in inv)
        return AffineUnimodularMap(inv, t)


def _integer_inverse(m: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    d = len(m)
    det = _det(m)
    if d == 2:
        (a, b), (c, e) = m
        adj = ((e, -b), (-c, a))
    else:
        cols = [tuple(m[i][j] for i in range(3)) for j in range(3)]
        rows = [cross(cols[1], cols[2]), cross(cols[2], cols[0]), cross(cols[0], cols[1])]
        adj = tuple(tuple(r) for r in rows)
    return tuple(tuple(c // det for c in row) for row in adj)


def apply_map(phi: AffineUnimodularMap, P: Polytope) -> Polytope:
    if phi.dim != P.ambient:
        raise ValueError("map and polytope dimensions differ")
    if P.is_empty:
        return P
    return hull(phi(v) for v in P.vertices)
