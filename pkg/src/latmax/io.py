"""JSON formats for polytopes and reports. Rationals travel as strings."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .geometry import Polytope, hull, rat

FORMAT_VERSION = 1
_RATIONAL = re.compile(r"^-?\d+(/[1-9]\d*)?$")


class FormatError(ValueError):
    """Invalid input file; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def format_rational(x) -> str:
    x = rat(x)
    return str(x)


def parse_rational(s: Any, where: str) -> int | Fraction:
    if not isinstance(s, str) or not _RATIONAL.match(s):
        raise FormatError(where, f"expected a string 'p' or 'p/q', got {s!r}")
    if "/" in s:
        num, den = (int(t) for t in s.split("/"))
        if den == 1 or math.gcd(num, den) != 1:
            raise FormatError(where, f"rational {s!r} is not in lowest terms")
    return rat(Fraction(s))


def point_to_json(p) -> list[str]:
    return [format_rational(c) for c in p]


@dataclass
class PolytopeFile:
    name: str
    polytope: Polytope
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "vertices": [point_to_json(v) for v in self.polytope.vertices],
            "metadata": self.metadata,
        }


def polytope_from_dict(d: Any, where: str = "$") -> PolytopeFile:
    if not isinstance(d, dict):
        raise FormatError(where, "expected an object with fields name, vertices, metadata")
    unknown = set(d) - {"name", "vertices", "metadata"}
    if unknown:
        raise FormatError(where, f"unknown fields {sorted(unknown)}")
    name = d.get("name")
    if not isinstance(name, str):
        raise FormatError(f"{where}.name", "expected a string")
    verts = d.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise FormatError(f"{where}.vertices", "expected a nonempty list of coordinate lists")
    meta = d.get("metadata", {})
    if not isinstance(meta, dict):
        raise FormatError(f"{where}.metadata", "expected an object")
    pts = []
    dim = None
    for i, v in enumerate(verts):
        w = f"{where}.vertices[{i}]"
        if not isinstance(v, list) or len(v) not in (2, 3):
            raise FormatError(w, "expected a list of 2 or 3 coordinates")
        if dim is None:
            dim = len(v)
        elif len(v) != dim:
            raise FormatError(w, f"expected {dim} coordinates like the first vertex")
        pts.append(tuple(parse_rational(c, f"{w}[{j}]") for j, c in enumerate(v)))
    P = hull(pts)
    if not P.full_dimensional:
        raise FormatError(f"{where}.vertices", f"points span only dimension {P.dim}")
    return PolytopeFile(name, P, meta)


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def loads_polytope(text: str) -> PolytopeFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno}, column {e.colno}", e.msg) from None
    return polytope_from_dict(data)


def read_polytope(path: str) -> PolytopeFile:
    with open(path, encoding="utf-8") as fh:
        return loads_polytope(fh.read())


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def strip_timings(report: dict) -> dict:
    """Copy of a report without the nondeterministic ``timings`` section."""
    return {k: v for k, v in report.items() if k != "timings"}
