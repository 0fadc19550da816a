"""Acceptance criteria 1-9, each printed as one PASS/FAIL line."""

from __future__ import annotations

import json
import random
import time

from conftest import random_unimodular, record_acceptance
from latmax.classification import (
    M_CATALOG,
    Q_CATALOG,
    slice_structure_check,
    unimodular_equivalent,
    verify_catalogs,
)
from latmax.cli import main, search_report_dict
from latmax.geometry import apply_map, det3, difference_body, hull, sub, volume
from latmax.io import dumps, strip_timings
from latmax.lattice import brute_force_width_at_least, width_at_least
from latmax.maximality import is_r_maximal_2d
from latmax.search import height_bound
from test_lattice import _functionals, _precondition_polytope


def _criterion(number, title, fn):
    try:
        fn()
    except BaseException:
        record_acceptance(number, title, False)
        raise
    record_acceptance(number, title, True)


def test_1_apex_count(full_search):
    def run():
        rep = search_report_dict(full_search)
        assert rep["apex_total"] == 69
        assert sum(rep["apex_counts"].values()) == 69

    _criterion(1, "apex count over ell in {1,2,3} is 69", run)


def test_2_height_bounds():
    def run():
        assert (height_bound(1), height_bound(2), height_bound(3)) == (12, 32, 21)

    _criterion(2, "height bounds 12/32/21", run)


def test_3_no_certificate_implies_r_maximal(full_search):
    def run():
        unresolved = [s for s in full_search.survivors if s.verdict.potentially_z_maximal]
        assert unresolved
        assert all(s.verdict.r_maximal for s in unresolved)
        assert not full_search.theorem_violations
        assert full_search.timings["total"] <= 3600

    _criterion(3, "every survivor without a certificate is R^3-maximal (<= 60 min)", run)


def test_4_width_three_classes(full_search):
    def run():
        classes = full_search.classes
        assert len(classes) == 5
        assert all(c.representative.is_integral for c in classes)
        # width-two catalog and width-three classes are disjoint, giving twelve in total
        for c in classes:
            for e in M_CATALOG.values():
                assert unimodular_equivalent(c.representative, e.polytope) is None
        assert len(classes) + len(M_CATALOG) == 12

    _criterion(4, "5 width-three classes, 12 bounded maximal polytopes in total", run)


def test_5_width_two_catalog():
    def run():
        t0 = time.perf_counter()
        checks = [c for c in verify_catalogs() if c.subject in M_CATALOG]
        elapsed = time.perf_counter() - t0
        assert len(M_CATALOG) == 7
        failed = [c for c in checks if not c.passed]
        assert not failed, failed
        assert elapsed < 1.0, elapsed

    _criterion(5, "width-two catalog: lattice-free, facets, ld, width 2, R^3-maximal", run)


def test_6_slice_structure():
    def run():
        for name in M_CATALOG:
            failed = [c for c in slice_structure_check(name) if not c.passed]
            assert not failed, failed

    _criterion(6, "slice structure of the width-two catalog", run)


def test_7_two_dimensional_classification(oracle_default):
    def run():
        res = oracle_default
        assert sorted(res.class_names()) == sorted(Q_CATALOG)
        assert len(res.classes) == 4
        assert all(is_r_maximal_2d(c.representative) for c in res.classes)
        assert res.seconds <= 300, res.seconds

    _criterion(7, "2D oracle returns exactly Q2..Q5, all R^2-maximal", run)


def test_8_size_bounds(full_search):
    def run():
        assert full_search.survivors
        for s in full_search.survivors:
            assert s.bounds.all_hold, (s.polytope, s.bounds)
            assert volume(s.polytope) <= 27
            assert s.ld <= 3

    _criterion(8, "vol <= 27, vol(P-P) <= 216, lambda_1(P-P) > 1/4, ld <= 3 on all survivors", run)


def test_9_property_suites(tmp_path):
    def run():
        rng = random.Random(909)
        done = 0
        while done < 100:
            pts = [tuple(rng.randint(-6, 6) for _ in range(3)) for _ in range(4)]
            if det3(*(sub(p, pts[0]) for p in pts[1:])) == 0:
                continue
            T = hull(pts)
            assert volume(difference_body(T)) == 20 * volume(T)
            done += 1

        for _ in range(200):
            P, a = _precondition_polytope(rng)
            assert width_at_least(P, a) == brute_force_width_at_least(P, 3, radius=5)

        for e in M_CATALOG.values():
            ref = _functionals(e.polytope)
            for _ in range(20):
                assert _functionals(apply_map(random_unimodular(rng), e.polytope)) == ref

        reports = []
        for jobs in ("1", "2"):
            out = tmp_path / f"search_{jobs}.json"
            assert main(["search", "--ld", "1", "--jobs", jobs, "--out", str(out)]) == 0
            reports.append(dumps(strip_timings(json.loads(out.read_text()))))
        assert reports[0] == reports[1]

    _criterion(9, "property suites: T-T law, V-set lemma, invariance, determinism", run)
