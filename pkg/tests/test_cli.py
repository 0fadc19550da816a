from __future__ import annotations

import json
import subprocess
import sys

import pytest

from latmax.cli import catalog_files, main
from latmax.io import FormatError, dumps, loads_polytope, strip_timings

CUBE = {
    "name": "cube",
    "vertices": [[str(x), str(y), str(z)] for x in (0, 1) for y in (0, 1) for z in (0, 1)],
    "metadata": {"note": "unit cube"},
}


def _run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_catalog_round_trip():
    for f in catalog_files():
        text = dumps(f.to_dict())
        again = loads_polytope(text)
        assert again.polytope == f.polytope
        assert dumps(again.to_dict()) == text


def test_rationals_are_strings():
    text = dumps(next(f for f in catalog_files() if f.name == "Q3").to_dict())
    assert '"-1"' in text and '"3/2"' in text and "1.5" not in text


@pytest.mark.parametrize(
    "doc,where",
    [
        ({"name": 1, "vertices": []}, "$.name"),
        ({"name": "x", "vertices": [["0", "0", "0"]] * 2}, "$.vertices"),
        ({"name": "x", "vertices": [["0", "0", "0"], [0, "1", "0"]]}, "$.vertices[1][0]"),
        ({"name": "x", "vertices": [["2/4", "0", "0"]]}, "$.vertices[0][0]"),
        ({"name": "x", "vertices": [["1", "0"], ["0", "0", "1"]]}, "$.vertices[1]"),
        ({"name": "x", "vertices": [["0", "0"]], "extra": 1}, "$"),
    ],
)
def test_parse_errors_name_the_field(doc, where):
    with pytest.raises(FormatError) as e:
        loads_polytope(json.dumps(doc))
    assert e.value.where == where


def test_parse_error_reports_line():
    with pytest.raises(FormatError) as e:
        loads_polytope('{\n "name": "x",\n "vertices": [\n')
    assert e.value.where.startswith("line ")


def test_verify_catalog_mode(tmp_path):
    code, rep = _run(["verify", "--export", str(tmp_path / "cat")], tmp_path)
    assert code == 0 and rep["failed"] == 0
    assert len(list((tmp_path / "cat").iterdir())) == 11


def test_verify_file_mode_cube(tmp_path):
    src = tmp_path / "cube.json"
    src.write_text(json.dumps(CUBE))
    code, rep = _run(["verify", "--input", str(src)], tmp_path)
    r = rep["result"]
    assert code == 0
    assert r["lattice_free"] is True
    assert r["verdict"]["r_maximal"] is False
    assert r["verdict"]["z_certificate"] is not None


def test_verify_file_mode_bad_json(tmp_path, capsys):
    src = tmp_path / "bad.json"
    src.write_text('{"name": "x", "vertices": "nope"}')
    assert main(["verify", "--input", str(src)]) == 1
    assert "$.vertices" in capsys.readouterr().err


def test_usage_errors(capsys):
    for argv in (["search", "--ld", "4"], ["classify2d", "--margin", "0"], ["search", "--jobs", "0"], []):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 1
    assert main(["classify2d", "--window", "2", "5"]) == 1


def test_bad_jobs_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("LATMAX_JOBS", "many")
    assert main(["search", "--ld", "1", "--out", str(tmp_path / "x.json")]) == 1


def test_search_reports_identical_across_jobs(tmp_path, monkeypatch):
    code1, a = _run(["search", "--ld", "1", "--jobs", "1"], tmp_path, "a.json")
    monkeypatch.setenv("LATMAX_JOBS", "2")
    code2, b = _run(["search", "--ld", "1"], tmp_path, "b.json")
    assert code1 == code2 == 0
    assert b["timings"]["jobs"] == 2
    assert dumps(strip_timings(a)) == dumps(strip_timings(b))
    assert a["apex_total"] == 2 and a["height_bounds"]["derived"] == {"1": 12}


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "v.json"
    res = subprocess.run(
        [sys.executable, "-m", "latmax.cli", "verify", "--out", str(out)], capture_output=True, text=True
    )
    assert res.returncode == 0, res.stderr
    assert json.loads(out.read_text())["command"] == "verify"
