"""Lattice functionals of exact polytopes.

Integer points are found by scanning: the outer coordinate runs over its
integer range, the middle coordinate over the exact range of the
corresponding slice, and the innermost coordinate is bounded directly by the
facet inequalities. All bounds are integer floor/ceil divisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .geometry import (
    AffineUnimodularMap,
    Point,
    Polytope,
    _monotone_chain,
    affine_dimension,
    cross,
    dilate,
    hull,
    primitive,
    rat,
)


def _ceil(x) -> int:
    return -((-x.numerator) // x.denominator) if isinstance(x, Fraction) else int(x)


def _floor(x) -> int:
    return x.numerator // x.denominator if isinstance(x, Fraction) else int(x)


def integer_inequalities(P: Polytope) -> list[tuple[tuple[int, ...], int]]:
    """Facet inequalities of P scaled to ``<n, x> <= b`` with integer n and b."""
    out = []
    for f in P.facets:
        b = f.offset
        if isinstance(b, Fraction):
            out.append((tuple(c * b.denominator for c in f.normal), b.numerator))
        else:
            out.append((f.normal, b))
    return out


def _last_axis_bounds(ineqs, prefix: Sequence[int], strict: bool) -> tuple[int, int] | None:
    """Integer range of the last coordinate given the other coordinates."""
    lo, hi = -math.inf, math.inf
    k = len(prefix)
    for n, b in ineqs:
        r = b - sum(n[i] * prefix[i] for i in range(k))
        c = n[k]
        if c > 0:
            ub = -((-r) // c) - 1 if strict else r // c
            if ub < hi:
                hi = ub
        elif c < 0:
            lb = r // c + 1 if strict else -((-r) // c)
            if lb > lo:
                lo = lb
        elif (r <= 0) if strict else (r < 0):
            return None
        if lo > hi:
            return None
    return lo, hi


def _slice_range(vertices: Sequence[Point], x) -> tuple[int, int] | None:
    """Integer range of the second coordinate over P ∩ {x_1 = x} (3D)."""
    vals = []
    below = [v for v in vertices if v[0] < x]
    above = [v for v in vertices if v[0] > x]
    vals.extend(v[1] for v in vertices if v[0] == x)
    for p in below:
        for q in above:
            vals.append(p[1] + Fraction(x - p[0]) * (q[1] - p[1]) / (q[0] - p[0]))
    if not vals:
        return None
    return _ceil(min(vals)), _floor(max(vals))


def iter_lattice_points(P: Polytope, strict: bool = False) -> Iterator[tuple[int, ...]]:
    """Integer points of a full-dimensional P (interior only if ``strict``), lexicographically."""
    if not P.full_dimensional:
        raise ValueError("scanning needs a full-dimensional polytope")
    ineqs = integer_inequalities(P)
    lo, hi = P.bounding_box()
    if P.ambient == 2:
        for x in range(_ceil(lo[0]), _floor(hi[0]) + 1):
            r = _last_axis_bounds(ineqs, (x,), strict)
            if r:
                for y in range(r[0], r[1] + 1):
                    yield (x, y)
        return
    verts = P.vertices
    for x in range(_ceil(lo[0]), _floor(hi[0]) + 1):
        yr = _slice_range(verts, x)
        if yr is None:
            continue
        for y in range(yr[0], yr[1] + 1):
            r = _last_axis_bounds(ineqs, (x, y), strict)
            if r:
                for z in range(r[0], r[1] + 1):
                    yield (x, y, z)


def integer_points(P: Polytope) -> list[tuple[int, ...]]:
    """All integer points of a bounded P in lexicographic order."""
    if P.is_empty:
        return []
    if P.full_dimensional:
        return list(iter_lattice_points(P))
    lo, hi = P.bounding_box()
    box = product(*(range(_ceil(a), _floor(b) + 1) for a, b in zip(lo, hi)))
    return [z for z in box if P.contains(z)]


def interior_lattice_point(P: Polytope) -> tuple[int, ...] | None:
    return next(iter_lattice_points(P, strict=True), None)


def is_lattice_free(P: Polytope) -> bool:
    if not P.full_dimensional:
        raise ValueError("lattice-freeness is only queried for full-dimensional bodies")
    return interior_lattice_point(P) is None


# --------------------------------------------------------------------------
# Lattice diameter


@dataclass(frozen=True)
class LatticeDiameterWitness:
    z: tuple[int, ...]
    z_prime: tuple[int, ...]
    value: int


def lattice_diameter_of_points(points: Sequence[Sequence[int]]) -> LatticeDiameterWitness | None:
    if len(points) < 2:
        return None
    Z = np.array(points, dtype=np.int64)
    i, j = np.triu_indices(len(points), k=1)
    g = np.gcd.reduce(np.abs(Z[i] - Z[j]), axis=1)
    best = int(np.argmax(g))
    return LatticeDiameterWitness(tuple(points[i[best]]), tuple(points[j[best]]), int(g[best]))


def lattice_diameter_witness(P: Polytope) -> LatticeDiameterWitness | None:
    return lattice_diameter_of_points(integer_points(P))


def lattice_diameter(P: Polytope) -> int:
    """max gcd(z - z') over integer points z, z' of P; 0 with fewer than two points."""
    w = lattice_diameter_witness(P)
    return 0 if w is None else w.value


# --------------------------------------------------------------------------
# Successive minimum threshold


def is_origin_symmetric(C: Polytope) -> bool:
    vs = set(C.vertices)
    return all(tuple(-c for c in v) in vs for v in vs)


def quarter_minimum_witness(C: Polytope) -> tuple[int, ...] | None:
    """A nonzero integer point of C/4, or None when lambda_1(C) > 1/4."""
    if not is_origin_symmetric(C):
        raise ValueError("first successive minimum needs an o-symmetric body")
    origin = (0,) * C.ambient
    for z in iter_lattice_points(dilate(C, Fraction(1, 4))):
        if z != origin:
            return z
    return None


def first_minimum_exceeds_quarter(C: Polytope) -> bool:
    return quarter_minimum_witness(C) is None


# --------------------------------------------------------------------------
# Lattice width


@dataclass(frozen=True)
class WidthCertificate:
    direction: tuple[int, ...]
    width: object


def v_set(a: Sequence[int]) -> list[tuple[int, int, int]]:
    """Directions sufficient to decide width >= 3 for bodies containing o, e1, e2 and a.

    V = {v != o : |v1|, |v2|, |v1 - v2| <= 2 and |<v, a>| <= 2}.
    """
    a1, a2, h = a
    if h < 1:
        raise ValueError("apex height must be positive")
    out = []
    for v1 in range(-2, 3):
        for v2 in range(-2, 3):
            if abs(v1 - v2) > 2:
                continue
            s = v1 * a1 + v2 * a2
            for v3 in range(-((2 + s) // h), (2 - s) // h + 1):
                if (v1, v2, v3) != (0, 0, 0):
                    out.append((v1, v2, v3))
    return out


_E = ((0, 0, 0), (1, 0, 0), (0, 1, 0))


def width_at_least(P: Polytope, a: Sequence[int], k: int = 3) -> bool:
    """Decide ``lw(P) >= 3`` from the finite direction set V (needs o, e1, e2, a in P)."""
    if k != 3:
        raise ValueError("only the threshold 3 is supported")
    a = tuple(a)
    for p in _E + (a,):
        if not P.contains(p):
            raise ValueError(f"precondition violated: {p} not in P")
    return min_width_over(P.vertices, v_set(a)) >= 3


def min_width_over(vertices: Sequence[Point], directions: Sequence[Sequence[int]]):
    den = 1
    for v in vertices:
        for c in v:
            if isinstance(c, Fraction):
                den = math.lcm(den, c.denominator)
    V = np.array([[int(c * den) for c in v] for v in vertices], dtype=np.int64)
    D = np.array(directions, dtype=np.int64)
    vals = V @ D.T
    w = int((vals.max(axis=0) - vals.min(axis=0)).min())
    return Fraction(w, den) if den > 1 else w


def primitive_directions(d: int, radius: int) -> list[tuple[int, ...]]:
    """One primitive direction per +-pair with max-norm <= radius.

    Ordered by L1 norm, then lexicographically descending, so e1 comes first.
    """
    out = []
    for v in product(range(-radius, radius + 1), repeat=d):
        if not any(v):
            continue
        first = next(c for c in v if c != 0)
        if first < 0 or reduce(math.gcd, (abs(c) for c in v)) != 1:
            continue
        out.append(v)
    out.sort(key=lambda v: (sum(abs(c) for c in v), tuple(-c for c in v)))
    return out


def lattice_width_heuristic(P: Polytope, radius: int = 5) -> WidthCertificate:
    """Smallest width over primitive directions of max-norm <= radius (an upper bound on lw)."""
    if radius < 1:
        raise ValueError("radius must be positive")
    dirs = primitive_directions(P.ambient, radius)
    den = 1
    for v in P.vertices:
        for c in v:
            if isinstance(c, Fraction):
                den = math.lcm(den, c.denominator)
    V = np.array([[int(c * den) for c in v] for v in P.vertices], dtype=np.int64)
    vals = V @ np.array(dirs, dtype=np.int64).T
    widths = vals.max(axis=0) - vals.min(axis=0)
    i = int(np.argmin(widths))
    w = Fraction(int(widths[i]), den)
    return WidthCertificate(dirs[i], w.numerator if w.denominator == 1 else w)


def brute_force_width_at_least(P: Polytope, k: int = 3, radius: int = 5) -> bool:
    return lattice_width_heuristic(P, radius).width >= k


def _adjugate(D: list[list[int]]) -> tuple[list[list[int]], int]:
    if len(D) == 2:
        (a, b), (c, d) = D
        return [[d, -b], [-c, a]], a * d - b * c
    # columns of the adjugate are cross products of the rows of D
    r0, r1, r2 = D
    cols = [cross(r1, r2), cross(r2, r0), cross(r0, r1)]
    det = sum(x * y for x, y in zip(r0, cols[0]))
    return [[cols[j][i] for j in range(3)] for i in range(3)], det


def lattice_width(P: Polytope) -> WidthCertificate:
    """Exact lattice width of a full-dimensional P with a minimising direction.

    With rows D = v_i - v_0 for affinely independent vertices, every direction u
    of width <= w satisfies |D u| <= w componentwise, so u = D^-1 b ranges over
    finitely many b. The heuristic value w0 bounds the search.
    """
    if not P.full_dimensional:
        raise ValueError("lattice width is computed for full-dimensional bodies")
    w0 = lattice_width_heuristic(P, 1).width
    d = P.ambient
    den = 1
    for v in P.vertices:
        for c in v:
            if isinstance(c, Fraction):
                den = math.lcm(den, c.denominator)
    V = [[int(c * den) for c in v] for v in P.vertices]
    chosen = [V[0]]
    for v in V[1:]:
        if affine_dimension(chosen + [v]) == len(chosen):
            chosen.append(v)
            if len(chosen) == d + 1:
                break
    rows = [[a - b for a, b in zip(v, V[0])] for v in chosen[1:]]
    adj, det = _adjugate(rows)
    W = _floor(w0 * den)
    adj_t = np.array(adj, dtype=np.int64).T
    Vn = np.array(V, dtype=np.int64)
    best, dirs = None, set()
    first = np.arange(-W, W + 1)
    rest = np.array(list(product(range(-W, W + 1), repeat=d - 1)), dtype=np.int64)
    for b0 in first:
        B = np.hstack([np.full((len(rest), 1), b0, dtype=np.int64), rest])
        U = B @ adj_t
        U = U[(U % det == 0).all(axis=1)] // det
        U = U[U.any(axis=1)]
        if not len(U):
            continue
        vals = Vn @ U.T
        widths = vals.max(axis=0) - vals.min(axis=0)
        m = int(widths.min())
        if best is None or m < best:
            best, dirs = m, set()
        if m == best:
            dirs |= {primitive(tuple(int(c) for c in u)) for u in U[widths == m]}
    norm = {tuple(-c for c in u) if next(c for c in u if c) < 0 else u for u in dirs}
    u = min(norm, key=lambda v: (sum(abs(c) for c in v), tuple(-c for c in v)))
    return WidthCertificate(u, rat(Fraction(int(best), den)))


# --------------------------------------------------------------------------
# Blocked facets


def facet_relative_interior_points(P: Polytope, i: int) -> list[tuple[int, ...]]:
    """Integer points in the relative interior of facet (or edge, in 2D) ``i``."""
    f = P.facets[i]
    b = f.offset
    if isinstance(b, Fraction):
        return []
    n = f.normal
    fv = P.facet_vertices(i)
    if P.ambient == 2:
        return _edge_relint_points(fv[0], fv[1])
    k = min((j for j in range(3) if n[j] != 0), key=lambda j: abs(n[j]))
    keep = [j for j in range(3) if j != k]
    ring = _monotone_chain(sorted({(v[keep[0]], v[keep[1]]) for v in fv}))
    Q = hull(ring)
    out = []
    for p, q in iter_lattice_points(Q, strict=True) if Q.full_dimensional else ():
        r = b - n[keep[0]] * p - n[keep[1]] * q
        if r % n[k] == 0:
            x = [0, 0, 0]
            x[keep[0]], x[keep[1]], x[k] = p, q, r // n[k]
            out.append(tuple(x))
    return sorted(out)


def _edge_relint_points(p, q) -> list[tuple[int, int]]:
    dx, dy = q[0] - p[0], q[1] - p[1]
    out = []
    # integer points on the segment are p0 + t * step for a primitive rational step
    den = math.lcm(*(c.denominator if isinstance(c, Fraction) else 1 for c in (p[0], p[1], dx, dy)))
    P0 = (int(p[0] * den), int(p[1] * den))
    D = (int(dx * den), int(dy * den))
    g = math.gcd(abs(D[0]), abs(D[1]))
    step = (D[0] // g, D[1] // g)
    for t in range(1, g):
        x, y = P0[0] + t * step[0], P0[1] + t * step[1]
        if x % den == 0 and y % den == 0:
            out.append((x // den, y // den))
    return sorted(out)


def facet_blocked(P: Polytope, i: int) -> bool:
    return bool(facet_relative_interior_points(P, i))


def blocking_points(P: Polytope) -> list[list[tuple[int, ...]]]:
    return [facet_relative_interior_points(P, i) for i in range(len(P.facets))]


# --------------------------------------------------------------------------
# Apex normalisation


def normalize_apex(a: Sequence[int]) -> tuple[AffineUnimodularMap, tuple[int, int, int]]:
    """Shear fixing e1, e2 that moves (a1, a2, h) to (a1 mod h, a2 mod h, h)."""
    a1, a2, h = (int(c) for c in a)
    if h <= 0:
        raise ValueError("apex height must be positive")
    k1, k2 = -(a1 // h), -(a2 // h)
    phi = AffineUnimodularMap(((1, 0, k1), (0, 1, k2), (0, 0, 1)), (0, 0, 0))
    return phi, (a1 % h, a2 % h, h)
