"""Exhaustive search for lattice-free polytopes of lattice width at least three.

For each lattice diameter ell a base triangle B is fixed. Every apex
a = (a1, a2, h) with the pyramid T = conv(B + a) passing three cheap filters
seeds a growth process over a finite set of candidate vertices. The lattice
free polytopes of width >= 3 found this way are then assessed for maximality.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .classification import EquivalenceClass, dedup_classes
from .geometry import (
    Point,
    Polytope,
    area,
    cross,
    difference_body,
    dilate,
    dot,
    hull,
    sub,
    vertex_barycenter,
    volume,
)
from .lattice import (
    first_minimum_exceeds_quarter,
    integer_points,
    interior_lattice_point,
    is_lattice_free,
    iter_lattice_points,
    lattice_diameter,
    v_set,
)
from .maximality import MaximalityVerdict, is_r_maximal, z_nonmaximality_certificate

LD_VALUES = (1, 2, 3)
MAX_VOLUME = 27
MIN_HEIGHT = 3

_BASES = {
    1: ((-1, -1, 0), (1, 0, 0), (0, 1, 0)),
    2: ((0, 0, 0), (2, 0, 0), (0, 1, 0)),
    3: ((0, 0, 0), (3, 0, 0), (0, 1, 0)),
}


def _check_ld(ell: int) -> None:
    if ell not in _BASES:
        raise ValueError(f"lattice diameter must be one of {LD_VALUES}, got {ell!r}")


def fixed_base(ell: int) -> Polytope:
    """The base triangle for lattice diameter ell (a 2D polytope in the plane x3 = 0)."""
    _check_ld(ell)
    return hull(_BASES[ell])


def base_area(ell: int) -> Fraction:
    _check_ld(ell)
    return area(hull(v[:2] for v in _BASES[ell]))


def height_bound(ell: int) -> int:
    """Largest apex height that can occur for lattice diameter ell.

    For ell = 1 a separate double-pyramid argument gives 12. Otherwise the
    bound is vol(P - P) <= 8 * 27 combined with vol(T - T) = 20 vol(T).
    """
    _check_ld(ell)
    if ell == 1:
        return 12
    return int(Fraction(3 * 8 * MAX_VOLUME) / (20 * base_area(ell)))


# displayed alongside the derived values in reports
DISPLAYED_HEIGHT_BOUNDS = {1: 12, 2: 21, 3: 32}


@dataclass(frozen=True)
class ApexCandidate:
    ld: int
    apex: tuple[int, int, int]
    pyramid: Polytope

    @property
    def base(self) -> Polytope:
        return fixed_base(self.ld)

    @property
    def height(self) -> int:
        return self.apex[2]


def pyramid(ell: int, apex: Sequence[int]) -> Polytope:
    return hull(_BASES[ell] + (tuple(apex),))


def apex_filters(ell: int, T: Polytope) -> tuple[bool, bool, bool]:
    """(lattice-free, ld(T) = ell, lambda_1(T - T) > 1/4), evaluated lazily."""
    if not is_lattice_free(T):
        return (False, False, False)
    if lattice_diameter(T) != ell:
        return (True, False, False)
    return (True, True, first_minimum_exceeds_quarter(difference_body(T)))


def enumerate_apexes(ell: int, min_height: int = MIN_HEIGHT) -> list[ApexCandidate]:
    _check_ld(ell)
    out = []
    for h in range(min_height, height_bound(ell) + 1):
        for a1 in range(h):
            for a2 in range(h):
                T = pyramid(ell, (a1, a2, h))
                if all(apex_filters(ell, T)):
                    out.append(ApexCandidate(ell, (a1, a2, h), T))
    return out


def region_factor(T: Polytope) -> Fraction:
    return 4 * (Fraction(MAX_VOLUME) / volume(T) - 1) + 1


def search_region(T: Polytope) -> list[tuple[int, int, int]]:
    """Integer points of the homothet lam*T + (1 - lam)*c with 0 <= x3 <= h.

    c is the vertex barycenter of T and h the apex height. Any x with
    vol(conv(T + x)) <= 27 lies in the homothet.
    """
    h = max(v[2] for v in T.vertices)
    R = dilate(T, region_factor(T), vertex_barycenter(T))
    return [p for p in iter_lattice_points(R) if 0 <= p[2] <= h]


def _barycentric_system(T: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Integer affine functions x @ A + c, one per vertex of the tetrahedron T.

    Column i vanishes on the facet opposite vertex i and is positive at that
    vertex; all columns share the scale 6 vol(T).
    """
    t = list(T.vertices)
    A = np.zeros((3, 4), dtype=np.int64)
    c = np.zeros(4, dtype=np.int64)
    for i in range(4):
        j, k, m = (t[s] for s in range(4) if s != i)
        n = cross(sub(k, j), sub(m, j))
        b = dot(n, j)
        sign = 1 if b - dot(n, t[i]) > 0 else -1
        A[:, i] = [-sign * x for x in n]
        c[i] = sign * b
    return A, c


def _engulfs_some(Cv: np.ndarray, Bw: np.ndarray) -> np.ndarray:
    """Whether adding the point v puts some point w into the interior.

    Cv has shape (n, 4): barycentric values of candidate points v. Bw has shape
    (m, 4) for points w. w is interior to conv(T + v) iff on every ray from v
    through w the exit from T happens before w is reached, which in
    barycentric values reads: d = B - C, C_i > 0 where d_i = 0,
    B_j > 0 where d_j < 0, and C_i B_j < C_j B_i whenever d_i > 0 > d_j.
    """
    C = Cv[:, None, :]
    B = Bw[None, :, :]
    d = B - C
    ok = np.where(d == 0, C > 0, True).all(-1) & np.where(d < 0, B > 0, True).all(-1)
    for i in range(4):
        for j in range(4):
            if i != j:
                ok &= ~((d[..., i] > 0) & (d[..., j] < 0)) | (
                    C[..., i] * B[..., j] < C[..., j] * B[..., i]
                )
    return ok.any(axis=1)


def candidate_sort_key(v: Sequence[int]) -> tuple:
    return (-abs(v[1]), tuple(v))


def candidate_vertices(
    T: Polytope, ell: int, prefilter: bool = True, chunk: int = 500
) -> list[tuple[int, int, int]]:
    """C(T): region points v (not vertices of T) with conv(T + v) lattice-free
    and of lattice diameter ell, sorted by decreasing |v2| then lexicographically.

    The prefilters only reject points with an explicit witness: an integer
    point that becomes interior, or an integer point of T at gcd-distance > ell.
    """
    pts = [p for p in search_region(T) if p not in T.vertices]
    if not pts:
        return []
    V = np.array(pts, dtype=np.int64)
    keep = np.ones(len(V), dtype=bool)
    if prefilter:
        A, c = _barycentric_system(T)
        lo, hi = T.bounding_box()
        h = hi[2]
        W = np.array(
            [
                (x, y, z)
                for x in range(lo[0] - 2, hi[0] + 3)
                for y in range(lo[1] - 2, hi[1] + 3)
                for z in range(1, h)
            ],
            dtype=np.int64,
        )
        Bw = W @ A + c
        for s in range(0, len(V), chunk):
            keep[s : s + chunk] = ~_engulfs_some(V[s : s + chunk] @ A + c, Bw)
        Z = np.array(integer_points(T), dtype=np.int64)
        g = np.gcd.reduce(np.abs(V[:, None, :] - Z[None, :, :]), axis=2)
        keep &= (g <= ell).all(axis=1)
    out = []
    for v in map(tuple, V[keep].tolist()):
        P = hull(T.vertices + (v,))
        if interior_lattice_point(P) is None and lattice_diameter(P) == ell:
            out.append(v)
    out.sort(key=candidate_sort_key)
    return out


class _WidthOracle:
    """lw(hull(P + {v_{i+1}, ..., v_k})) >= 3 via the V-set directions.

    Suffix extrema of the candidate values make each test O(|V(P)|).
    """

    def __init__(self, apex: Sequence[int], candidates: Sequence[Point], k: int = 3):
        self.dirs = np.array(v_set(apex), dtype=np.int64)
        self.k = k
        n, m = len(candidates), len(self.dirs)
        self.smax = np.full((n + 1, m), np.iinfo(np.int64).min // 2, dtype=np.int64)
        self.smin = np.full((n + 1, m), np.iinfo(np.int64).max // 2, dtype=np.int64)
        if n:
            vals = np.array(candidates, dtype=np.int64) @ self.dirs.T
            for i in range(n - 1, -1, -1):
                self.smax[i] = np.maximum(self.smax[i + 1], vals[i])
                self.smin[i] = np.minimum(self.smin[i + 1], vals[i])

    def __call__(self, P: Polytope, i: int) -> bool:
        """Width test with the candidates from 0-based index i onward."""
        pv = P.integer_vertex_array @ self.dirs.T
        w = np.maximum(pv.max(0), self.smax[i]) - np.minimum(pv.min(0), self.smin[i])
        return bool((w >= self.k).all())


def grow_polytopes(
    T: Polytope,
    candidates: Sequence[Point],
    ell: int,
    apex: Sequence[int],
    trace: list | None = None,
    check: bool = True,
) -> list[Polytope]:
    """Compute X_k from X_0 = {T}; the result is sorted by vertex tuple.

    Members are keyed by their vertex tuple so that a polytope reached through
    different insertion orders is stored once. With ``trace`` the key set of
    every X_i (i = 0..k) is appended to it.
    """
    width_ok = _WidthOracle(apex, candidates)
    X = {T.vertices: T} if width_ok(T, 0) else {}
    if trace is not None:
        trace.append(frozenset(X))
    for i, v in enumerate(candidates):
        nxt: dict = {}
        for key, P in X.items():
            if width_ok(P, i + 1):
                nxt[key] = P
            if P.contains(v):
                continue
            Q = hull(P.vertices + (v,))
            if Q.vertices in nxt or not width_ok(Q, i + 1):
                continue
            if interior_lattice_point(Q) is not None or lattice_diameter(Q) != ell:
                continue
            nxt[Q.vertices] = Q
        X = nxt
        if check:
            for P in X.values():
                assert P.contains_polytope(T), "member does not contain T"
        if trace is not None:
            trace.append(frozenset(X))
    if check:
        for P in X.values():
            assert is_lattice_free(P) and lattice_diameter(P) == ell
    return [X[k] for k in sorted(X)]


@dataclass(frozen=True)
class SizeBounds:
    volume: bool
    difference_volume: bool
    first_minimum: bool
    lattice_diameter: bool

    @property
    def all_hold(self) -> bool:
        return self.volume and self.difference_volume and self.first_minimum and self.lattice_diameter


def size_bounds(P: Polytope) -> SizeBounds:
    D = difference_body(P)
    return SizeBounds(
        volume(P) <= MAX_VOLUME,
        volume(D) <= 8 * MAX_VOLUME,
        first_minimum_exceeds_quarter(D),
        lattice_diameter(P) <= 3,
    )


@dataclass
class Survivor:
    ld: int
    apex: tuple[int, int, int]
    polytope: Polytope
    verdict: MaximalityVerdict
    bounds: SizeBounds

    @property
    def maximal(self) -> bool:
        return self.verdict.potentially_z_maximal and self.verdict.r_maximal

    @property
    def contradicts_theorem(self) -> bool:
        return self.verdict.potentially_z_maximal and not self.verdict.r_maximal


@dataclass
class SearchConfig:
    ld_values: tuple[int, ...] = LD_VALUES
    certificate_margin: int = 2
    jobs: int = 1
    output_path: str | None = None

    def __post_init__(self):
        self.ld_values = tuple(sorted(set(self.ld_values)))
        if not self.ld_values:
            raise ValueError("ld_values must be nonempty")
        for ell in self.ld_values:
            _check_ld(ell)
        if self.certificate_margin < 1:
            raise ValueError("certificate_margin must be at least 1")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


@dataclass
class ApexResult:
    ld: int
    apex: tuple[int, int, int]
    candidate_count: int
    survivors: list[Survivor]
    seconds: float


@dataclass
class SearchReport:
    config: SearchConfig
    apex_counts: dict[int, int]
    apexes: list[ApexResult]
    classes: list[EquivalenceClass]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def apex_total(self) -> int:
        return sum(self.apex_counts.values())

    @property
    def survivors(self) -> list[Survivor]:
        return [s for r in self.apexes for s in r.survivors]

    @property
    def theorem_violations(self) -> list[Survivor]:
        return [s for s in self.survivors if s.contradicts_theorem]

    @property
    def bound_violations(self) -> list[Survivor]:
        return [s for s in self.survivors if not s.bounds.all_hold]

    @property
    def ok(self) -> bool:
        return not self.theorem_violations and not self.bound_violations


def process_apex(cand: ApexCandidate, margin: int = 2) -> ApexResult:
    t0 = time.perf_counter()
    C = candidate_vertices(cand.pyramid, cand.ld)
    found = grow_polytopes(cand.pyramid, C, cand.ld, cand.apex)
    survivors = []
    for P in found:
        cert = z_nonmaximality_certificate(P, margin)
        verdict = MaximalityVerdict(is_r_maximal(P), cert, margin)
        survivors.append(Survivor(cand.ld, cand.apex, P, verdict, size_bounds(P)))
    return ApexResult(cand.ld, cand.apex, len(C), survivors, time.perf_counter() - t0)


def _process_apex_args(args):
    return process_apex(*args)


def run_search(cfg: SearchConfig) -> SearchReport:
    """Run the full pipeline for the configured lattice diameters.

    Apexes are processed independently (in worker processes when jobs > 1)
    and merged in apex order, so the report does not depend on parallelism.
    """
    t0 = time.perf_counter()
    cands: list[ApexCandidate] = []
    counts: dict[int, int] = {}
    for ell in cfg.ld_values:
        found = enumerate_apexes(ell)
        counts[ell] = len(found)
        cands.extend(found)
    t1 = time.perf_counter()
    jobs = [(c, cfg.certificate_margin) for c in cands]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_process_apex_args, jobs))
    else:
        results = [_process_apex_args(j) for j in jobs]
    t2 = time.perf_counter()
    maximal = [s.polytope for r in results for s in r.survivors if s.maximal]
    classes = dedup_classes(maximal)
    t3 = time.perf_counter()
    timings = {
        "apex_enumeration": t1 - t0,
        "growth_and_assessment": t2 - t1,
        "deduplication": t3 - t2,
        "total": t3 - t0,
    }
    return SearchReport(cfg, counts, results, classes, timings)
