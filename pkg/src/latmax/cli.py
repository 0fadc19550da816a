"""Command-line entry point: ``latmax search | verify | classify2d``.

Exit status: 0 when every assertion holds, 1 for usage or input errors,
2 when a mathematical assertion fails.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from . import __version__
from .classification import (
    M_CATALOG,
    Q1_METADATA,
    Q_CATALOG,
    brute_force_2d_oracle,
    match_q,
    slice_structure_check,
    verify_catalogs,
)
from .geometry import Polytope, area, volume
from .io import FormatError, PolytopeFile, dumps, point_to_json, read_polytope, write_text
from .lattice import integer_points, is_lattice_free, lattice_diameter, lattice_width_heuristic
from .maximality import assess
from .search import (
    DISPLAYED_HEIGHT_BOUNDS,
    LD_VALUES,
    SearchConfig,
    SearchReport,
    height_bound,
    run_search,
    size_bounds,
)

EXIT_OK, EXIT_USAGE, EXIT_ASSERTION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {n}")
    return n


def _jobs_default() -> int | None:
    env = os.environ.get("LATMAX_JOBS")
    if env is None:
        return None
    try:
        return _positive(env)
    except argparse.ArgumentTypeError as e:
        raise UsageError(f"LATMAX_JOBS: {e}") from None


def _vertices(P: Polytope) -> list[list[str]]:
    return [point_to_json(v) for v in P.vertices]


def _bounds_dict(b) -> dict:
    return {
        "volume_le_27": b.volume,
        "difference_volume_le_216": b.difference_volume,
        "first_minimum_gt_quarter": b.first_minimum,
        "lattice_diameter_le_3": b.lattice_diameter,
    }


def _verdict_dict(v) -> dict:
    return {
        "r_maximal": v.r_maximal,
        "z_certificate": list(v.z_certificate) if v.z_certificate else None,
        "potentially_z_maximal": v.potentially_z_maximal,
        "certificate_margin": v.window_used,
    }


def _header(command: str) -> dict:
    return {"artifact": {"name": "latmax", "version": __version__}, "command": command}


def search_report_dict(rep: SearchReport) -> dict:
    survivors = []
    for s in rep.survivors:
        survivors.append(
            {
                "ld": s.ld,
                "apex": list(s.apex),
                "vertices": _vertices(s.polytope),
                "volume": str(volume(s.polytope)),
                "verdict": _verdict_dict(s.verdict),
                "size_bounds": _bounds_dict(s.bounds),
                "maximal": s.maximal,
            }
        )
    classes = []
    for c in rep.classes:
        P = c.representative
        classes.append(
            {
                "representative": _vertices(P),
                "members": len(c.members),
                "vertex_count": len(P.vertices),
                "facet_count": len(P.facets),
                "volume": str(volume(P)),
                "integer_points": len(integer_points(P)),
                "lattice_diameter": lattice_diameter(P),
            }
        )
    out = _header("search")
    out.update(
        {
            "config": {
                "ld_values": list(rep.config.ld_values),
                "certificate_margin": rep.config.certificate_margin,
            },
            "height_bounds": {
                "derived": {str(ell): height_bound(ell) for ell in rep.config.ld_values},
                "displayed": {str(ell): DISPLAYED_HEIGHT_BOUNDS[ell] for ell in rep.config.ld_values},
            },
            "apex_counts": {str(k): v for k, v in rep.apex_counts.items()},
            "apex_total": rep.apex_total,
            "apexes": [
                {
                    "ld": r.ld,
                    "apex": list(r.apex),
                    "candidate_count": r.candidate_count,
                    "survivor_count": len(r.survivors),
                }
                for r in rep.apexes
            ],
            "survivors": survivors,
            "classes": classes,
            "class_count": len(classes),
            "assertions": {
                "theorem_violations": len(rep.theorem_violations),
                "size_bound_violations": len(rep.bound_violations),
                "ok": rep.ok,
            },
            "timings": {
                "jobs": rep.config.jobs,
                "seconds": {k: round(v, 3) for k, v in rep.timings.items()},
                "apex_seconds": [round(r.seconds, 3) for r in rep.apexes],
            },
        }
    )
    return out


def _checks_dict(checks) -> list[dict]:
    return [
        {"subject": c.subject, "predicate": c.predicate, "passed": c.passed, "detail": c.detail}
        for c in checks
    ]


def catalog_files() -> list[PolytopeFile]:
    files = [PolytopeFile(n, Q, {"dimension": 2, "family": "Q"}) for n, Q in Q_CATALOG.items()]
    for e in M_CATALOG.values():
        files.append(
            PolytopeFile(
                e.name,
                e.polytope,
                {
                    "dimension": 3,
                    "family": "M",
                    "facets": e.facets,
                    "lattice_diameter": e.lattice_diameter,
                    "middle_slice": e.middle_slice,
                },
            )
        )
    return files


def verify_catalog_report() -> tuple[dict, bool]:
    checks = verify_catalogs()
    for name in M_CATALOG:
        checks += slice_structure_check(name)
    out = _header("verify")
    out.update(
        {
            "mode": "catalog",
            "catalog": [f.to_dict() for f in catalog_files()],
            "unbounded": Q1_METADATA,
            "checks": _checks_dict(checks),
            "failed": sum(not c.passed for c in checks),
        }
    )
    return out, all(c.passed for c in checks)


def verify_file_report(pf: PolytopeFile, margin: int) -> dict:
    P = pf.polytope
    out = _header("verify")
    lf = is_lattice_free(P)
    result: dict = {
        "name": pf.name,
        "vertices": _vertices(P),
        "dimension": P.ambient,
        "lattice_free": lf,
        "lattice_diameter": lattice_diameter(P),
    }
    if P.ambient == 3:
        cert = lattice_width_heuristic(P)
        result["volume"] = str(volume(P))
        result["lattice_width_upper_bound"] = {
            "width": str(cert.width),
            "direction": list(cert.direction),
        }
        result["size_bounds"] = _bounds_dict(size_bounds(P))
    else:
        result["area"] = str(area(P))
        result["matches"] = match_q(P) if lf and _half_integral(P) else None
    if lf:
        result["verdict"] = _verdict_dict(assess(P, margin))
    out.update({"mode": "file", "result": result})
    return out


def _half_integral(P: Polytope) -> bool:
    return all(getattr(c, "denominator", 1) in (1, 2) for v in P.vertices for c in v)


def classify2d_report(window: tuple[int, int], margin: int) -> tuple[dict, bool]:
    res = brute_force_2d_oracle(window, margin)
    names = res.class_names()
    ok = sorted(n for n in names if n) == sorted(Q_CATALOG) and None not in names
    out = _header("classify2d")
    out.update(
        {
            "window": list(window),
            "margin": margin,
            "lattice_free_polygons": res.lattice_free_polygons,
            "r_maximal_found": res.r_maximal_found,
            "classes": [
                {
                    "representative": _vertices(c.representative),
                    "members": len(c.members),
                    "matches": n,
                }
                for c, n in zip(res.classes, names)
            ],
            "class_count": len(res.classes),
            "ok": ok,
        }
    )
    return out, ok


def _emit(report: dict, path: str | None) -> None:
    text = dumps(report)
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="latmax", description="Maximal lattice-free polytopes: search and verification.")
    p.add_argument("--version", action="version", version=f"latmax {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", help="run the width >= 3 search")
    s.add_argument("--ld", choices=["1", "2", "3", "all"], default="all")
    s.add_argument("--margin", type=_positive, default=2, help="certificate search margin")
    s.add_argument("--jobs", type=_positive, default=None, help="worker processes (env LATMAX_JOBS)")
    s.add_argument("--out", help="write the JSON report here instead of stdout")

    v = sub.add_parser("verify", help="verify the catalogs or a polytope file")
    v.add_argument("--input", help="polytope JSON file to assess instead of the catalogs")
    v.add_argument("--margin", type=_positive, default=2)
    v.add_argument("--export", metavar="DIR", help="also write each catalog polytope to DIR")
    v.add_argument("--out")

    c = sub.add_parser("classify2d", help="brute-force census of half-integral polygons")
    c.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"), default=(-2, 4))
    c.add_argument("--margin", type=_positive, default=3)
    c.add_argument("--out")
    return p


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "search":
            jobs = args.jobs or _jobs_default() or 1
            lds = LD_VALUES if args.ld == "all" else (int(args.ld),)
            rep = run_search(SearchConfig(lds, args.margin, jobs, args.out))
            _emit(search_report_dict(rep), args.out)
            _log(
                f"apexes {rep.apex_total} {dict(rep.apex_counts)}, survivors {len(rep.survivors)}, "
                f"classes {len(rep.classes)}, {rep.timings['total']:.1f}s"
            )
            if not rep.ok:
                _log("assertion failure: see 'assertions' in the report")
                return EXIT_ASSERTION
            return EXIT_OK
        if args.command == "verify":
            if args.input:
                report = verify_file_report(read_polytope(args.input), args.margin)
                _emit(report, args.out)
                return EXIT_OK
            report, ok = verify_catalog_report()
            if args.export:
                os.makedirs(args.export, exist_ok=True)
                for f in catalog_files():
                    fname = f.name.replace("'", "p").replace(",", "_") + ".json"
                    write_text(os.path.join(args.export, fname), dumps(f.to_dict()))
            _emit(report, args.out)
            _log(f"catalog checks: {len(report['checks']) - report['failed']} passed, {report['failed']} failed")
            return EXIT_OK if ok else EXIT_ASSERTION
        if args.command == "classify2d":
            lo, hi = args.window
            if lo > 0 or hi < 1:
                raise UsageError("--window must contain [0, 1]")
            report, ok = classify2d_report((lo, hi), args.margin)
            _emit(report, args.out)
            _log(f"classes {report['class_count']}: {[c['matches'] for c in report['classes']]}")
            return EXIT_OK if ok else EXIT_ASSERTION
    except (UsageError, FormatError, OSError) as e:
        _log(f"latmax: error: {e}")
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
