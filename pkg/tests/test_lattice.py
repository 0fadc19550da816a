from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_unimodular
from latmax.classification import M_CATALOG, Q_CATALOG
from latmax.geometry import apply_map, difference_body, hull, volume
from latmax.lattice import (
    blocking_points,
    brute_force_width_at_least,
    facet_relative_interior_points,
    first_minimum_exceeds_quarter,
    integer_points,
    interior_lattice_point,
    is_lattice_free,
    lattice_diameter,
    lattice_width,
    lattice_width_heuristic,
    normalize_apex,
    primitive_directions,
    quarter_minimum_witness,
    v_set,
    width_at_least,
)
from latmax.maximality import is_r_maximal


def _bary_points(tet):
    """Integer points of a tetrahedron by barycentric coordinates (independent oracle)."""
    p0, p1, p2, p3 = tet
    M = [[p[k] - p0[k] for p in (p1, p2, p3)] for k in range(3)]

    def det(m):
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    D = det(M)
    lo = [min(p[k] for p in tet) for k in range(3)]
    hi = [max(p[k] for p in tet) for k in range(3)]
    inside, interior = [], []
    for z in product(*(range(lo[k], hi[k] + 1) for k in range(3))):
        r = [z[k] - p0[k] for k in range(3)]
        lam = []
        for j in range(3):
            m = [row[:] for row in M]
            for k in range(3):
                m[k][j] = r[k]
            lam.append(Fraction(det(m), D))
        lam.append(1 - sum(lam))
        if all(x >= 0 for x in lam):
            inside.append(z)
            if all(x > 0 for x in lam):
                interior.append(z)
    return inside, interior


def _ld_oracle(points):
    return max((math.gcd(*(abs(a - b) for a, b in zip(p, q))) for p, q in combinations(points, 2)), default=0)


def test_integer_points_of_m42_match_barycentric_oracle():
    P = M_CATALOG["M_4,2"].polytope
    inside, interior = _bary_points(P.vertices)
    assert integer_points(P) == sorted(inside)
    assert interior == []
    assert _ld_oracle(inside) == lattice_diameter(P) == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-4, 4)] * 3), min_size=4, max_size=4, unique=True))
def test_integer_points_random_tetrahedra(pts):
    P = hull(pts)
    if P.dim < 3:
        return
    inside, interior = _bary_points(P.vertices)
    assert integer_points(P) == sorted(inside)
    assert (interior_lattice_point(P) is None) == (not interior)
    assert lattice_diameter(P) == _ld_oracle(inside)


def test_rational_polytope_points():
    Q = Q_CATALOG["Q3"]
    assert integer_points(Q) == [(-1, 0), (0, 0), (0, 1), (1, 0), (1, 1), (2, 0)]
    assert is_lattice_free(Q)
    assert lattice_diameter(Q) == 3


def test_lattice_free_requires_full_dimension():
    with pytest.raises(ValueError):
        is_lattice_free(hull([(0, 0, 0), (1, 0, 0), (0, 1, 0)]))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=4, max_size=8, unique=True),
    st.tuples(*[st.integers(-3, 3)] * 3),
)
def test_lattice_diameter_monotone(pts, extra):
    P = hull(pts)
    if P.dim < 3:
        return
    assert lattice_diameter(hull(pts + [extra])) >= lattice_diameter(P)


def test_first_minimum_predicate():
    cube = hull([(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])
    assert first_minimum_exceeds_quarter(cube)
    big = hull([(4 * x, 4 * y, 4 * z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])
    assert not first_minimum_exceeds_quarter(big)
    assert quarter_minimum_witness(big) is not None
    with pytest.raises(ValueError):
        first_minimum_exceeds_quarter(hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]))


def test_first_minimum_boundary_is_strict():
    # C/4 = [-1, 1] x [-1/4, 1/4]^2 meets e1 on its boundary, so lambda_1 = 1/4 exactly
    C = hull([(4 * x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])
    assert not first_minimum_exceeds_quarter(C)
    C = hull([(3 * x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)])
    assert first_minimum_exceeds_quarter(C)


def test_v_set_examples():
    V = v_set((0, 0, 1))
    assert (0, 0, 1) in V and (1, 0, 0) in V and (0, 0, 0) not in V
    assert all(abs(v[0]) <= 2 and abs(v[1]) <= 2 and abs(v[0] - v[1]) <= 2 for v in V)
    assert all(abs(v[2]) <= 2 for v in V)
    for v in v_set((2, 1, 5)):
        assert abs(2 * v[0] + v[1] + 5 * v[2]) <= 2


def test_width_at_least_precondition():
    with pytest.raises(ValueError):
        width_at_least(hull([(1, 1, 1), (5, 0, 0), (0, 5, 0), (0, 0, 5)]), (0, 0, 5))


def _precondition_polytope(rng):
    h = rng.randint(1, 4)
    a = (rng.randint(0, h - 1), rng.randint(0, h - 1), h)
    pts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), a]
    pts += [tuple(rng.randint(-3, 4) for _ in range(3)) for _ in range(rng.randint(0, 4))]
    return hull(pts), a


def test_v_set_lemma_agrees_with_brute_force():
    # With 0 <= a1, a2 < h every direction of width < 3 has max-norm < 4,
    # so the radius-5 enumeration is a complete oracle here.
    rng = random.Random(4242)
    verdicts = []
    for _ in range(200):
        P, a = _precondition_polytope(rng)
        fast = width_at_least(P, a)
        assert fast == brute_force_width_at_least(P, 3, radius=5)
        assert fast == (lattice_width(P).width >= 3)
        verdicts.append(fast)
    assert 20 < sum(verdicts) < 180


def test_primitive_directions_order():
    dirs = primitive_directions(3, 2)
    assert dirs[:3] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert len(dirs) == len(set(dirs))
    assert all(next(c for c in v if c) > 0 for v in dirs)


def test_lattice_width_catalog():
    for e in M_CATALOG.values():
        assert lattice_width(e.polytope).width == 2
        assert lattice_width_heuristic(e.polytope).width == 2
    assert lattice_width(Q_CATALOG["Q3"]).width == Fraction(3, 2)


def test_blocking_points_q3():
    Q = Q_CATALOG["Q3"]
    pts = sorted(p for b in blocking_points(Q) for p in b)
    assert pts == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(blocking_points(Q))


def test_facet_relative_interior_excludes_edges():
    P = hull([(0, 0, 0), (2, 0, 0), (0, 2, 0), (0, 0, 2)])
    bottom = next(i for i, f in enumerate(P.facets) if f.normal == (0, 0, -1))
    # integer points of the base triangle all lie on its edges
    assert facet_relative_interior_points(P, bottom) == []
    Q = hull([(0, 0, 0), (3, 0, 0), (0, 3, 0), (0, 0, 1)])
    bottom = next(i for i, f in enumerate(Q.facets) if f.normal == (0, 0, -1))
    assert facet_relative_interior_points(Q, bottom) == [(1, 1, 0)]


def test_normalize_apex():
    phi, a = normalize_apex((7, -3, 4))
    assert a == (3, 1, 4) and phi((7, -3, 4)) == a
    assert phi((1, 0, 0)) == (1, 0, 0) and phi((0, 1, 0)) == (0, 1, 0)


def _functionals(P):
    return (
        volume(P),
        len(P.vertices),
        len(P.facets),
        len(integer_points(P)),
        is_lattice_free(P),
        lattice_diameter(P),
        lattice_width(P).width,
        sum(map(bool, blocking_points(P))),
        is_r_maximal(P),
        first_minimum_exceeds_quarter(difference_body(P)),
    )


@pytest.mark.parametrize("name", list(M_CATALOG))
def test_functionals_invariant_under_unimodular_maps(name):
    P = M_CATALOG[name].polytope
    ref = _functionals(P)
    rng = random.Random(name)
    for _ in range(20):
        assert _functionals(apply_map(random_unimodular(rng), P)) == ref
