import json
import math
import re

import pytest

from rpgauge.cli import main

from conftest import SEED, data_path

E1, E2, E3 = data_path("e1.csv"), data_path("e2.csv"), data_path("e3.csv")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def gauge_file(tmp_path):
    p = tmp_path / "g.json"
    assert main(["recover", "--input", E1, "--out", str(p)]) == 0
    return str(p)


class TestCheck:
    def test_consistent(self, capsys):
        code, doc, _ = run(capsys, "check", "--input", E1, "--mode", "strict")
        assert code == 0 and doc["consistent"] is True
        assert doc["margin"] == pytest.approx(math.log(25 / 16), abs=1e-12)

    def test_violation_reports_witness(self, capsys):
        code, doc, _ = run(capsys, "check", "--input", E2)
        assert code == 2 and doc["consistent"] is False
        assert doc["witness"] == [1, 2]

    def test_json_input(self, capsys):
        code, doc, _ = run(capsys, "check", "--input", data_path("e1.json"))
        assert code == 0 and doc["mode"] == "weak"

    def test_verbose_notes_go_to_stderr(self, capsys):
        code, doc, err = run(capsys, "check", "--input", E1, "--verbose")
        assert code == 0 and "1..T" in err


class TestSolveRecover:
    @pytest.mark.parametrize("kind", ["lambda", "mu"])
    def test_solve(self, capsys, kind):
        code, doc, _ = run(capsys, "solve", "--input", E1, "--kind", kind, "--mode", "strict")
        assert code == 0 and doc["kind"] == kind
        assert min(doc[kind]) > 0 and doc["slack"] > 0

    def test_solve_infeasible(self, capsys):
        code, doc, _ = run(capsys, "solve", "--input", E2)
        assert code == 2 and doc["consistent"] is False

    def test_recover(self, capsys, tmp_path):
        out = tmp_path / "g.json"
        code, doc, _ = run(capsys, "recover", "--input", E1, "--out", str(out))
        assert code == 0 and doc is None
        g = json.loads(out.read_text())
        assert g["mode"] == "strict" and g["lambda"] == [1.0, 1.0]

    def test_recover_tie_not_strict(self, capsys):
        code, doc, _ = run(capsys, "recover", "--input", E3)
        assert code == 2 and doc["consistent"] is False
        code, doc, _ = run(capsys, "recover", "--input", E3, "--mode", "weak")
        assert code == 0


class TestEvalDual:
    def test_eval(self, capsys, gauge_file):
        code, doc, _ = run(capsys, "eval", "--gauge", gauge_file, "--point", "2,1",
                           "--point", "0,0")
        assert code == 0
        a, b = doc["points"]
        assert a["Q"] == 4.0 and a["active"] == [1] and a["boundary_point"] == [0.5, 0.25]
        assert b["Q"] == 0.0 and "active" not in b

    def test_dual(self, capsys, gauge_file):
        code, doc, _ = run(capsys, "dual", "--gauge", gauge_file, "--point", "1,1")
        assert code == 0 and doc["points"][0]["P"] == pytest.approx(2 / 3, abs=1e-9)

    def test_dimension_mismatch(self, capsys, gauge_file):
        code, doc, err = run(capsys, "eval", "--gauge", gauge_file, "--point", "1,2,3")
        assert code == 1 and doc is None and "coordinates" in err


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ["check"],
        ["check", "--input", "missing.csv"],
        ["eval", "--point", "1,1"],
        ["plot", "--svg", "x.svg"],
    ])
    def test_missing_inputs(self, capsys, argv):
        code, doc, err = run(capsys, *argv)
        assert code == 1 and doc is None and err.startswith("error:")

    @pytest.mark.parametrize("argv", [["bogus"], ["check", "--mode", "other"],
                                      ["smooth", "--quad-order", "-3"], []])
    def test_bad_command_line(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1

    def test_malformed_data(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,p1,p2,q1,q2\n1,1,-2,1,1\n")
        code, _, err = run(capsys, "check", "--input", str(p))
        assert code == 1 and "negative" in err

    def test_three_goods_not_planar(self, capsys, tmp_path):
        p = tmp_path / "g3.json"
        p.write_text(json.dumps({"lambda": [1.0], "prices": [[1.0, 1.0, 1.0]]}))
        code, _, err = run(capsys, "certify", "--gauge", str(p), "--body", "chi")
        assert code == 1 and "planar" in err


class TestCertifyPlot:
    def test_polygon_fails(self, capsys, gauge_file):
        code, doc, _ = run(capsys, "certify", "--gauge", gauge_file, "--body", "chi")
        assert code == 2 and doc["passed"] is False and doc["body"] == "chi"

    def test_parallel_is_c1(self, capsys, gauge_file):
        code, doc, _ = run(capsys, "certify", "--gauge", gauge_file, "--body", "parallel",
                           "--eps", "0.1")
        checks = {c["name"]: c["passed"] for c in doc["checks"]}
        assert checks["c1_refinement"] and checks["unique_support"]
        # flat facets survive the parallel body, so strict convexity does not
        assert code == 2 and not checks["strict_convexity"]

    @pytest.mark.parametrize("kind", ["utility", "price"])
    def test_plot(self, capsys, tmp_path, kind):
        svg = tmp_path / "p.svg"
        code, doc, _ = run(capsys, "plot", "--input", E1, "--svg", str(svg), "--kind", kind,
                           "--levels", "1,2")
        assert code == 0 and doc["levels"] == [1.0, 2.0]
        text = svg.read_text()
        assert text.count("<polyline") == 2
        assert text.count("<circle") == (2 if kind == "utility" else 0)


@pytest.fixture(scope="module")
def smoothed(tmp_path_factory):
    d = tmp_path_factory.mktemp("smooth")
    gauge, out, svg = d / "g.json", d / "report.json", d / "e1.svg"
    assert main(["recover", "--input", E1, "--out", str(gauge)]) == 0
    code = main(["smooth", "--input", E1, "--gauge", str(gauge), "--out", str(out),
                 "--svg", str(svg)])
    return code, out.read_text(), svg.read_text()


class TestSmooth:
    def test_exit_and_report(self, smoothed):
        code, text, _ = smoothed
        doc = json.loads(text)
        assert code == 0 and doc["passed"] is True
        assert doc["s_points"] == [[0.5, 0.25], [0.25, 0.5]]
        assert doc["config"]["seed"] == SEED

    def test_svg_overlay(self, smoothed):
        _, _, svg = smoothed
        assert svg.count("<polyline") == 3 and svg.count("<circle") == 2
        assert re.search(r'viewBox="[-0-9.e ]+"', svg)

    def test_matches_library(self, smoothed, e1_smoothing):
        # recover piped into smooth on the command line equals the library call
        assert smoothed[1] == e1_smoothing.report.dumps() + "\n"

    def test_tie_is_negative(self, capsys, tmp_path):
        # both bundles sit on the kink of the gauge, so no facet is strict
        data, g = tmp_path / "tie.csv", tmp_path / "g.json"
        data.write_text("t,p1,p2,q1,q2\n1,1,2,1,1\n2,2,1,1,1\n")
        g.write_text(json.dumps({"lambda": [1.0, 1.0], "prices": [[1.0, 2.0], [2.0, 1.0]]}))
        code, doc, _ = run(capsys, "smooth", "--input", str(data), "--gauge", str(g))
        assert code == 2 and "strictness violated" in doc["error"]

    def test_zero_quantities_rejected(self, capsys, tmp_path):
        g = tmp_path / "g.json"
        assert main(["recover", "--input", E3, "--mode", "weak", "--out", str(g)]) == 0
        code, _, err = run(capsys, "smooth", "--input", E3, "--gauge", str(g))
        assert code == 1 and "strictly positive" in err

    def test_inconsistent_is_negative(self, capsys):
        code, doc, _ = run(capsys, "smooth", "--input", E2)
        assert code == 2 and doc["consistent"] is False
