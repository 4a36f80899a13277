import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from bconvex.cli import run
from bconvex.documents import DocumentError, dump_document, parse_points, parse_vector
from cases import FUNDEX


def doc(points, **extra):
    return {"dim": len(points[0]), "points": [[str(v) for v in p] for p in points], **extra}


def call(tmp_path, command, document, *flags):
    path = tmp_path / "in.json"
    path.write_text(document if isinstance(document, str) else json.dumps(document))
    out = io.StringIO()
    code = run([command, "--input", str(path), *flags], stdout=out)
    return code, out.getvalue()


def outputs(text):
    return json.loads(text)["outputs"]


class TestCommands:
    def test_hull(self, tmp_path):
        code, text = call(tmp_path, "hull", doc(FUNDEX))
        assert code == 0
        out = outputs(text)
        assert len(out["intermediates"]) == 8 and len(out["orthants"]) == 5
        code, text = call(tmp_path, "hull", doc([(1, -2)]))
        assert [p["zeta"]["exact"] for p in outputs(text)["intermediates"]] == [["1", "-2"]]
        code, text = call(tmp_path, "hull", doc([(1, 2), (2, 1)]))
        assert len(outputs(text)["intermediates"]) == 2

    def test_member(self, tmp_path):
        code, text = call(tmp_path, "member", doc(FUNDEX), "--point", "0,0,0", "--point", "3,3,3")
        assert code == 0
        assert [r["member"] for r in outputs(text)] == [False, True]
        assert outputs(text)[1]["orthant"] == "+++"

    def test_det(self, tmp_path):
        code, text = call(tmp_path, "det", {"matrix": [["1", "0"], ["0", "1"]]})
        assert code == 0 and outputs(text)["det_infty"]["exact"] == "1"
        code, text = call(tmp_path, "det", {"matrix": [["1", "3", "-1"], ["3", "2", "-1"], ["1", "1", "1"]]})
        assert outputs(text)["det_infty"] == {"exact": "-9", "decimal": "-9"}

    def test_solve(self, tmp_path):
        system = {"matrix": [["-2", "3", "-1"], ["2", "-1", "-3"], ["1", "1", "1"]], "rhs": ["0", "0", "1"]}
        code, text = call(tmp_path, "solve", system)
        out = outputs(text)
        assert code == 0 and out["solution"]["exact"] == ["1", "2/3", "2/3"] and out["reconstructs"]

    def test_hyperplane(self, tmp_path):
        code, text = call(tmp_path, "hyperplane", doc(FUNDEX))
        out = outputs(text)
        assert out["coeffs"]["exact"] == ["9", "9", "-9"]
        assert out["canonical"]["coeffs"]["exact"] == ["1", "1", "-1"] and out["canonical"]["rhs"]["exact"] == "-1"

    def test_separate(self, tmp_path):
        other = tmp_path / "origin.json"
        other.write_text(json.dumps(doc([(0, 0, 0)])))
        code, text = call(tmp_path, "separate", doc(FUNDEX), "--against", str(other))
        out = outputs(text)
        assert code == 0 and out["verified"]
        assert out["halfspace"]["a"]["exact"] == ["1", "1", "-1"] and out["halfspace"]["c"]["exact"] == "-1"
        assert out["checked_points"] >= 8
        code2, text2 = call(tmp_path, "separate", doc(FUNDEX, against=[["0", "0", "0"]]))
        assert code2 == 0 and outputs(text2)["halfspace"] == out["halfspace"]

    def test_hrep(self, tmp_path):
        code, text = call(tmp_path, "hrep", doc(list(FUNDEX) + [(0, 0, 0)]))
        assert code == 0
        faces = {(tuple(h["a"]["exact"]), h["c"]["exact"]) for h in outputs(text)["halfspaces"]}
        assert (("-1", "-1", "1"), "1") in faces and (("1", "0", "-1"), "0") in faces
        assert json.loads(text)["diagnostics"]["member_violations"] == 0

    def test_oracle(self, tmp_path):
        code, text = call(tmp_path, "oracle", {"matrix": [["1", "3", "-1"], ["3", "2", "-1"], ["1", "1", "1"]]}, "--quantity", "det")
        out = outputs(text)
        assert code == 0 and out["converged"] and out["limit"]["exact"] == "-9"
        code, text = call(tmp_path, "oracle", {"values": ["1", "2"]}, "--quantity", "sum", "--p-schedule", "1,2,4")
        assert list(outputs(text)["values"]) == ["1", "2", "4"]
        code, text = call(tmp_path, "oracle", doc(FUNDEX), "--quantity", "hull", "--point", "0,0,0", "--p-schedule", "4,8")
        assert outputs(text)[0]["by_order"] == {"4": False, "8": False}

    def test_settings_recorded(self, tmp_path):
        code, text = call(tmp_path, "det", {"matrix": [["2"]]})
        assert json.loads(text)["settings"] == {
            "p_schedule": [1, 2, 4, 8, 16, 32, 64],
            "tolerance": 1e-6,
            "precision_bits": 256,
            "seed": 42,
            "parallel": False,
        }


class TestExitCodes:
    def test_parse_errors(self, tmp_path):
        assert call(tmp_path, "hull", "{not json")[0] == 1
        assert call(tmp_path, "hull", {"points": [["1.5", "2"]]})[0] == 1
        assert call(tmp_path, "hull", {"points": [[1.5, 2]]})[0] == 1
        assert call(tmp_path, "hull", {"dim": 3, "points": [["1", "2"]]})[0] == 1
        assert call(tmp_path, "member", doc(FUNDEX))[0] == 1
        assert run(["nosuchcommand"], stdout=io.StringIO()) == 1
        assert run(["hull", "--input", str(tmp_path / "missing.json")], stdout=io.StringIO()) == 1

    def test_domain_errors(self, tmp_path):
        assert call(tmp_path, "solve", {"matrix": [["1", "1"], ["1", "1"]], "rhs": ["1", "1"]})[0] == 2
        assert call(tmp_path, "hull", doc([(1,) * 5]))[0] == 2
        assert call(tmp_path, "separate", doc(FUNDEX, against=[list(map(str, FUNDEX[0]))]))[0] == 2
        assert call(tmp_path, "hyperplane", doc([(1, 1), (1, 1)]))[0] == 2

    def test_member_exits_zero_when_false(self, tmp_path):
        assert call(tmp_path, "member", doc(FUNDEX), "--point", "0,0,0")[0] == 0

    def test_installed_script(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"matrix": [["1", "0"], ["0", "1"]]}))
        ok = subprocess.run([sys.executable, "-m", "bconvex", "det", "-i", str(path)], capture_output=True, text=True)
        assert ok.returncode == 0 and json.loads(ok.stdout)["outputs"]["det_infty"]["exact"] == "1" and not ok.stderr
        bad = subprocess.run([sys.executable, "-m", "bconvex", "det"], input="[1]", capture_output=True, text=True)
        assert bad.returncode == 1 and bad.stdout == "" and "error" in bad.stderr


class TestDocuments:
    def test_round_trip(self, tmp_path):
        for command, document, flags in [
            ("hull", doc(FUNDEX), ()),
            ("solve", {"matrix": [["-2", "3", "-1"], ["2", "-1", "-3"], ["1", "1", "1"]], "rhs": ["0", "0", "1"]}, ()),
            ("member", doc(FUNDEX), ("--point", "3,3,3")),
        ]:
            _, text = call(tmp_path, command, document, *flags)
            parsed = json.loads(text)
            assert dump_document(parsed) == text
        _, text = call(tmp_path, "hull", doc(FUNDEX))
        zetas = {parse_vector(p["zeta"]["exact"]) for p in outputs(text)["intermediates"]}
        assert (F(3, 2), 0, F(3, 2)) in zetas

    def test_determinism(self, tmp_path):
        for command, flags in [("hull", ()), ("separate", ()), ("hrep", ()), ("render", ("--grid", "5"))]:
            d = doc(FUNDEX, against=[["0", "0", "0"]])
            first = call(tmp_path, command, d, *flags)
            second = call(tmp_path, command, d, *flags)
            assert first == second

    def test_output_file(self, tmp_path):
        target = tmp_path / "out.json"
        code, text = call(tmp_path, "det", {"matrix": [["3"]]}, "--output", str(target))
        assert code == 0 and text == "" and json.loads(target.read_text())["outputs"]["det_infty"]["exact"] == "3"

    def test_parse_points_rejects_ragged(self):
        with pytest.raises(DocumentError):
            parse_points({"points": [["1", "2"], ["1"]]})


class TestRender:
    def _rows(self, text):
        return list(csv.reader(io.StringIO(text)))

    def test_two_point_staircase(self, tmp_path):
        code, text = call(tmp_path, "render", doc([(2, 1), (1, 2)]), "--grid", "9", "--bbox", "0:2,0:2")
        rows = self._rows(text)
        assert code == 0 and rows[0] == ["x1", "x2", "member"] and len(rows) == 82
        hits = {(F(r[0]), F(r[1])) for r in rows[1:] if r[2] == "1"}
        # the max-times segment: an L-shaped path through (2, 2)
        assert hits == {(2, F(k, 4)) for k in range(4, 9)} | {(F(k, 4), 2) for k in range(4, 9)}

    def test_far_window_is_empty(self, tmp_path):
        code, text = call(tmp_path, "render", doc([(2, 1), (1, 2)]), "--grid", "6", "--bbox", "10:11,10:11")
        assert code == 0 and all(r[-1] == "0" for r in self._rows(text)[1:])

    def test_fundex_raster_agrees_with_member(self, tmp_path):
        code, text = call(tmp_path, "render", doc(FUNDEX), "--grid", "41")
        rows = self._rows(text)[1:]
        assert code == 0 and len(rows) == 41**3
        positives = [",".join(r[:3]) for r in rows if r[3] == "1"]
        assert positives
        flags = [f"--point={p}" for p in positives]
        code, text = call(tmp_path, "member", doc(FUNDEX), *flags)
        assert code == 0 and all(r["member"] for r in outputs(text))

    def test_unsupported_dimension(self, tmp_path):
        assert call(tmp_path, "render", doc([(1,)]))[0] == 1
