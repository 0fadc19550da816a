"""R-maximality via blocked facets and heuristic certificates against Z-maximality."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .geometry import Polytope, hull
from .lattice import (
    _ceil,
    _floor,
    blocking_points,
    integer_inequalities,
    integer_points,
    interior_lattice_point,
    is_lattice_free,
)


@dataclass(frozen=True)
class MaximalityVerdict:
    r_maximal: bool
    z_certificate: tuple[int, ...] | None
    window_used: int

    @property
    def potentially_z_maximal(self) -> bool:
        return self.z_certificate is None


def is_r_maximal(P: Polytope) -> bool:
    """True iff every facet of the lattice-free polytope P is blocked."""
    if not is_lattice_free(P):
        raise ValueError("R-maximality is only defined here for lattice-free polytopes")
    return all(blocking_points(P))


def is_r_maximal_2d(Q: Polytope) -> bool:
    if Q.ambient != 2:
        raise ValueError("expected a polygon")
    return is_r_maximal(Q)


def _boundary_cones(P: Polytope) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For each boundary integer point w: the facets through w.

    Adding p makes w interior exactly when p is strictly beyond every facet
    through w. Returns (normals, offsets, incidence) with incidence[w, f].
    """
    ineqs = integer_inequalities(P)
    N = np.array([n for n, _ in ineqs], dtype=np.int64)
    b = np.array([c for _, c in ineqs], dtype=np.int64)
    Z = np.array(integer_points(P), dtype=np.int64).reshape(-1, P.ambient)
    tight = (Z @ N.T) == b
    return N, b, tight[tight.any(axis=1)]


def z_nonmaximality_certificate(P: Polytope, margin: int = 2) -> tuple[int, ...] | None:
    """First integer p outside P (lexicographic, in the bounding box inflated by
    ``margin``) such that conv(P ∪ {p}) is lattice-free.

    A returned point proves P is not Z-maximal; None is inconclusive.
    """
    if margin < 1:
        raise ValueError("margin must be at least 1")
    lo, hi = P.bounding_box()
    box = np.array(
        list(product(*(range(_ceil(a) - margin, _floor(c) + margin + 1) for a, c in zip(lo, hi)))),
        dtype=np.int64,
    )
    N, b, tight = _boundary_cones(P)
    beyond = (box @ N.T) > b
    outside = beyond.any(axis=1)
    # blocked[p, w]: p beyond every facet through w (w has at least one facet)
    blocked = (beyond[:, None, :] | ~tight[None, :, :]).all(axis=2).any(axis=1)
    for p in box[outside & ~blocked].tolist():
        Q = hull(P.vertices + (tuple(p),))
        if interior_lattice_point(Q) is None:
            return tuple(p)
    return None


def assess(P: Polytope, margin: int = 2) -> MaximalityVerdict:
    if not is_lattice_free(P):
        raise ValueError("assess() expects a lattice-free polytope")
    cert = z_nonmaximality_certificate(P, margin)
    return MaximalityVerdict(is_r_maximal(P), cert, margin)
