"""Catalogs of maximal lattice-free polytopes, unimodular equivalence and the
brute-force census of half-integral lattice-free polygons."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

from .geometry import (
    AffineUnimodularMap,
    Polytope,
    affine_dimension,
    apply_map,
    area,
    hull,
    minkowski_sum_2d,
    scale,
    slice_at_height,
    volume,
    width_in_direction,
)
from .lattice import (
    integer_points,
    is_lattice_free,
    lattice_diameter,
    lattice_width_heuristic,
)
from .maximality import is_r_maximal

h = Fraction(1, 2)

# Bounded Z^2-maximal lattice-free half-integral polygons (Q_1 = [0,1] x R is unbounded).
Q_CATALOG: dict[str, Polytope] = {
    "Q2": hull([(0, 0), (2, 0), (0, 2)]),
    "Q3": hull([(h - 3 * h, 0), (h + 3 * h, 0), (h, 3 * h)]),
    "Q4": hull([(h - 1, 0), (h + 1, 0), (h, 2)]),
    "Q5": hull([(-h, h), (h, 3 * h), (3 * h, h), (h, -h)]),
}
Q1_METADATA = {"name": "Q1", "description": "[0,1] x R", "bounded": False}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    polytope: Polytope
    facets: int
    lattice_diameter: int
    # maps the polytope into R^2 x [-1, 1] with width 2 in direction e3
    normal_position: AffineUnimodularMap
    # expected 2D class of the middle slice, up to equivalence
    middle_slice: str


def _p(*vs) -> Polytope:
    return hull(vs)


_DOWN = AffineUnimodularMap.translation_by((0, 0, -1))

M_CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("M_4,6", _p((-2, 0, 0), (4, 0, 0), (1, 3, 0), (0, 0, 2)), 4, 6, _DOWN, "Q3"),
        CatalogEntry("M_4,4", _p((0, 0, 0), (4, 0, 0), (0, 4, 0), (0, 0, 2)), 4, 4, _DOWN, "Q2"),
        CatalogEntry(
            "M_4,2", _p((-1, 1, 0), (1, 3, 0), (0, 0, 2), (2, -2, 2)), 4, 2, _DOWN, "Q5"
        ),
        CatalogEntry("M'_4,4", _p((-1, 0, 0), (3, 0, 0), (1, 4, 0), (0, 0, 2)), 4, 4, _DOWN, "Q4"),
        CatalogEntry(
            "M_5,4",
            _p((1, -1, 0), (-1, 1, 0), (3, 1, 0), (1, 3, 0), (0, 0, 2)),
            5,
            4,
            _DOWN,
            "Q5",
        ),
        CatalogEntry(
            "M_5,2",
            _p((-1, 0, 0), (1, 0, 0), (0, 2, 0), (0, 0, 2), (2, 0, 2), (1, 2, 2)),
            5,
            2,
            _DOWN,
            "Q4",
        ),
        CatalogEntry(
            "M_6,2",
            _p(
                (0, 0, 0), (-1, 1, 0), (0, 2, 0), (1, 1, 0),
                (0, 0, 2), (1, 1, 2), (2, 0, 2), (1, -1, 2),
            ),
            6,
            2,
            _DOWN,
            "Q5",
        ),
    ]
}


# --------------------------------------------------------------------------
# Unimodular equivalence


def _independent_tuple(vertices: Sequence) -> tuple:
    d = len(vertices[0])
    chosen = [vertices[0]]
    for v in vertices[1:]:
        if affine_dimension(chosen + [v]) == len(chosen):
            chosen.append(v)
            if len(chosen) == d + 1:
                return tuple(chosen)
    raise ValueError("no affinely independent vertex tuple; polytope is not full-dimensional")


def _det(cols: Sequence[Sequence[int]]) -> int:
    if len(cols) == 2:
        return cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1]
    a, b, c = cols
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - b[0] * (a[1] * c[2] - a[2] * c[1])
        + c[0] * (a[1] * b[2] - a[2] * b[1])
    )


def _solve_linear_map(U: list, W: list) -> tuple | None:
    """Integer matrix M with M u_i = w_i for the columns u_i of U, if one exists."""
    d = len(U)
    D = _det(U)
    # Cramer: row r of M solves U^T m_r = (w_1[r], ..., w_d[r])
    rows = []
    for r in range(d):
        rhs = [W[i][r] for i in range(d)]
        row = []
        for j in range(d):
            cols = [list(u) for u in U]
            # replace the j-th coordinate of each u_i by rhs[i]
            for i in range(d):
                cols[i][j] = rhs[i]
            num = _det(cols)
            if num % D:
                return None
            row.append(num // D)
        rows.append(tuple(row))
    return tuple(rows)


def _scaled_integer_vertices(P: Polytope, s: int) -> tuple:
    out = []
    for v in P.vertices:
        w = tuple(c * s for c in v)
        if any(isinstance(c, Fraction) and c.denominator != 1 for c in w):
            raise ValueError(f"vertex {v} is not in (1/{s})Z^d")
        out.append(tuple(int(c) for c in w))
    return tuple(sorted(out))


def unimodular_equivalent(
    A: Polytope, B: Polytope, denominator: int = 1
) -> AffineUnimodularMap | None:
    """A unimodular map phi with phi(A) = B, or None.

    Vertices map to vertices, so a fixed affinely independent vertex tuple of A
    is sent to every ordered tuple of B's vertices; each candidate is accepted
    iff it is integral, unimodular, and maps the vertex set of A onto that of B.
    ``denominator = s`` handles polytopes with vertices in (1/s)Z^d: both are
    scaled by s and the conjugated map must translate by a vector in sZ^d.
    """
    if A.ambient != B.ambient:
        return None
    if not A.full_dimensional or not B.full_dimensional:
        raise ValueError("equivalence is tested for full-dimensional polytopes")
    if len(A.vertices) != len(B.vertices) or len(A.facets) != len(B.facets):
        return None
    s = denominator
    VA = _scaled_integer_vertices(A, s)
    VB = _scaled_integer_vertices(B, s)
    target = set(VB)
    u = _independent_tuple(list(VA))
    d = len(u) - 1
    U = [tuple(ui - u0 for ui, u0 in zip(x, u[0])) for x in u[1:]]
    det_u = abs(_det(U))
    for w in permutations(VB, d + 1):
        W = [tuple(wi - w0 for wi, w0 in zip(x, w[0])) for x in w[1:]]
        if abs(_det(W)) != det_u:
            continue
        M = _solve_linear_map(U, W)
        if M is None:
            continue
        t = tuple(w[0][r] - sum(M[r][k] * u[0][k] for k in range(d)) for r in range(d))
        if any(c % s for c in t):
            continue
        image = {
            tuple(sum(M[r][k] * x[k] for k in range(d)) + t[r] for r in range(d)) for x in VA
        }
        if image == target:
            return AffineUnimodularMap(M, tuple(c // s for c in t))
    return None


def invariants(P: Polytope) -> tuple:
    """Cheap unimodular invariants used to prescreen equivalence tests."""
    if P.ambient == 2:
        return (len(P.vertices), len(P.facets), area(P), len(integer_points(P)))
    return (
        len(P.vertices),
        len(P.facets),
        volume(P),
        len(integer_points(P)),
        lattice_diameter(P),
    )


@dataclass
class EquivalenceClass:
    representative: Polytope
    members: list = field(default_factory=list)


def dedup_classes(polytopes: Iterable[Polytope], denominator: int = 1) -> list[EquivalenceClass]:
    """Partition by unimodular equivalence.

    The representative of each class is the member with the lexicographically
    smallest vertex tuple; classes are returned sorted by representative.
    """
    by_inv: dict[tuple, list[EquivalenceClass]] = {}
    for P in polytopes:
        bucket = by_inv.setdefault(invariants(P), [])
        for cls in bucket:
            if cls.members[0].vertices == P.vertices or unimodular_equivalent(
                cls.members[0], P, denominator
            ):
                cls.members.append(P)
                break
        else:
            bucket.append(EquivalenceClass(P, [P]))
    classes = [c for bucket in by_inv.values() for c in bucket]
    for c in classes:
        c.representative = min(c.members, key=lambda Q: Q.vertices)
    classes.sort(key=lambda c: c.representative.vertices)
    return classes


def match_q(Q: Polytope) -> str | None:
    """Name of the catalog polygon equivalent to Q, if any."""
    for name, ref in Q_CATALOG.items():
        if unimodular_equivalent(ref, Q, denominator=2):
            return name
    return None


# --------------------------------------------------------------------------
# Catalog verification


@dataclass
class Check:
    subject: str
    predicate: str
    passed: bool
    detail: str = ""


def verify_catalogs() -> list[Check]:
    checks: list[Check] = []
    for name, Q in Q_CATALOG.items():
        lf = is_lattice_free(Q)
        checks.append(Check(name, "lattice_free", lf))
        checks.append(Check(name, "r_maximal_2d", lf and is_r_maximal(Q)))
    for name, e in M_CATALOG.items():
        P = e.polytope
        lf = is_lattice_free(P)
        checks.append(Check(name, "lattice_free", lf))
        n_f = len(P.facets)
        checks.append(Check(name, "facet_count", n_f == e.facets, f"{n_f} (expected {e.facets})"))
        ld = lattice_diameter(P)
        checks.append(
            Check(name, "lattice_diameter", ld == e.lattice_diameter, f"{ld} (expected {e.lattice_diameter})")
        )
        w3 = width_in_direction(P, (0, 0, 1))
        checks.append(Check(name, "width_e3", w3 == 2, str(w3)))
        cert = lattice_width_heuristic(P, 5)
        checks.append(Check(name, "lattice_width_heuristic", cert.width == 2, f"{cert.width} via {cert.direction}"))
        checks.append(Check(name, "r_maximal", lf and is_r_maximal(P)))
    return checks


def _half_integral(Q: Polytope) -> bool:
    return all(
        isinstance(c, int) or c.denominator in (1, 2) for v in Q.vertices for c in v
    )


def slice_structure_check(name: str) -> list[Check]:
    """Layer structure of a width-two catalog member in normal position."""
    e = M_CATALOG[name]
    P = apply_map(e.normal_position, e.polytope)
    checks = [
        Check(name, "normal_position", all(-1 <= v[2] <= 1 for v in P.vertices)
              and width_in_direction(P, (0, 0, 1)) == 2)
    ]
    Pm, P0, Pp = (slice_at_height(P, t) for t in (-1, 0, 1))
    checks.append(Check(name, "P0_half_integral", _half_integral(P0)))
    checks.append(Check(name, "P0_lattice_free", P0.full_dimensional and is_lattice_free(P0)))
    q = match_q(P0) if P0.full_dimensional else None
    checks.append(Check(name, "P0_equivalent_to_Q", q == e.middle_slice, f"{q} (expected {e.middle_slice})"))
    layers_integral = all(isinstance(c, int) for L in (Pm, Pp) for v in L.vertices for c in v)
    checks.append(Check(name, "outer_layers_integral", layers_integral))
    S = minkowski_sum_2d(Pp, Pm)
    twice = hull(scale(2, v) for v in P0.vertices)
    checks.append(Check(name, "P1+P-1 in 2P0", twice.contains_polytope(S)))
    frac = [v for v in P0.vertices if not all(isinstance(c, int) for c in v)]
    if frac:
        ok = all(S.contains(scale(2, v)) for v in frac)
    else:
        ok = True
    checks.append(Check(name, "2conv(nonintegral V(P0)) in P1+P-1", ok))
    return checks


# --------------------------------------------------------------------------
# Brute-force census of half-integral polygons
#
# Polygons are handled doubled: a point of (1/2)Z^2 is stored as an integer
# pair, and the original integer lattice becomes (2Z)^2.


@dataclass
class OracleResult:
    classes: list[EquivalenceClass]
    lattice_free_polygons: int
    r_maximal_found: int
    z_filter_passed: int
    # polygons passing the Z-filter without being R-maximal (audit mode only)
    z_pass_not_r_maximal: list[Polytope] | None
    window: tuple[int, int]
    margin: int
    seconds: float = 0.0

    def class_names(self) -> list[str | None]:
        return [match_q(c.representative) for c in self.classes]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _ring(points: list) -> list:
    pts = sorted(points)
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _has_even_interior_point(ring: list) -> bool:
    eqs = []
    for i in range(len(ring)):
        (x0, y0), (x1, y1) = ring[i], ring[(i + 1) % len(ring)]
        a, b = y1 - y0, x0 - x1
        eqs.append((a, b, a * x0 + b * y0))
    xs = [p[0] for p in ring]
    x, hi = min(xs), max(xs)
    x += x % 2
    while x <= hi:
        ylo, yhi = -math.inf, math.inf
        for a, b, c in eqs:
            r = c - a * x
            if b > 0:
                yhi = min(yhi, -((-r) // b) - 1)
            elif b < 0:
                ylo = max(ylo, r // b + 1)
            elif r <= 0:
                ylo = math.inf
                break
        if ylo <= yhi and ylo + (ylo % 2) <= yhi:
            return True
        x += 2
    return False


def _edge_has_even_relint_point(p, q) -> bool:
    dx, dy = q[0] - p[0], q[1] - p[1]
    g = math.gcd(abs(dx), abs(dy))
    sx, sy = dx // g, dy // g
    return any((p[0] + t * sx) % 2 == 0 and (p[1] + t * sy) % 2 == 0 for t in range(1, g))


def _all_edges_blocked(ring: list) -> bool:
    return all(
        _edge_has_even_relint_point(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))
    )


def brute_force_2d_oracle(
    window: tuple[int, int] = (-2, 4), margin: int = 3, audit: bool = False
) -> OracleResult:
    """Census of the Z^2-maximal lattice-free polygons with vertices in (1/2)Z^2.

    Every lattice-free polygon with vertices in the window is generated exactly
    once: vertex sets in strictly convex position are grown in lexicographic
    order, and the first vertex is restricted to [0, 1)^2, which picks one
    integer translate of each polygon. A branch is cut as soon as its hull has
    an interior integer point (lattice-freeness is inherited by subsets).

    A polygon is kept when all its edges are blocked (exact R^2-maximality)
    and the heuristic Z^2-filter finds no extending integer point within
    ``margin``. With ``audit`` the Z-filter also runs on every polygon that
    is not R^2-maximal, to look for polygons that only pass the filter.
    """
    from .maximality import z_nonmaximality_certificate

    if margin < 1:
        raise ValueError("margin must be at least 1")
    lo, hi = window
    if lo > 0 or hi < 1:
        raise ValueError("window must contain [0, 1]")
    t0 = time.perf_counter()
    grid = [(x, y) for x in range(2 * lo, 2 * hi + 1) for y in range(2 * lo, 2 * hi + 1)]
    count = 0
    r_max: list[Polytope] = []
    z_pass = 0
    anomalies: list[Polytope] = []

    def polygon(ring):
        return hull([(Fraction(x, 2), Fraction(y, 2)) for x, y in ring])

    def grow(verts: list, start: int):
        nonlocal count, z_pass
        for idx in range(start, len(grid)):
            cand = verts + [grid[idx]]
            ring = _ring(cand)
            if len(ring) != len(cand):
                continue
            if len(cand) >= 3:
                if _has_even_interior_point(ring):
                    continue
                count += 1
                if _all_edges_blocked(ring):
                    Q = polygon(ring)
                    if z_nonmaximality_certificate(Q, margin) is None:
                        z_pass += 1
                        r_max.append(Q)
                elif audit:
                    Q = polygon(ring)
                    if z_nonmaximality_certificate(Q, margin) is None:
                        z_pass += 1
                        anomalies.append(Q)
            grow(cand, idx + 1)

    for idx, s in enumerate(grid):
        if 0 <= s[0] <= 1 and 0 <= s[1] <= 1:
            grow([s], idx + 1)
    classes = dedup_classes(r_max, denominator=2)
    return OracleResult(
        classes,
        count,
        len(r_max),
        z_pass,
        anomalies if audit else None,
        window,
        margin,
        time.perf_counter() - t0,
    )
