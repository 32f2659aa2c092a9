import json
import subprocess
import sys

import pytest

from skilllogic.cli import main

from .conftest import fixture_path

SOLAR = fixture_path("solar.json")
FIG1 = fixture_path("fig1.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_true(capsys):
    code, out, _ = run(capsys, "check", SOLAR, "e", "K[b] p & K[c] p")
    assert (code, out) == (0, "true\n")


def test_check_false(capsys):
    code, out, _ = run(capsys, "check", FIG1, "w5", "K[a] dp[a] p4")
    assert (code, out) == (1, "false\n")


def test_check_truth_set_and_oracle(capsys):
    code, out, _ = run(capsys, "check", FIG1, "w1", "K[a] p1", "--truth-set", "--oracle")
    assert code == 0
    assert out.splitlines() == ["true", "w1 w2 w3 w5"]


@pytest.mark.parametrize("argv, needle", [
    (["check", SOLAR, "e", "K[a (p"], "expected"),
    (["check", SOLAR, "zz", "p"], "unknown world"),
    (["check", "/nonexistent.json", "e", "p"], "No such file"),
    (["reduce", "nope", "p"], "unknown rewriting"),
    (["reduce", "ld-to-kdn", "C[a] p"], "outside LD"),
])
def test_errors_exit_two(capsys, argv, needle):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert needle in err


def test_usage_error_exits_two(capsys):
    assert run(capsys, "check")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_json_report(capsys):
    code, out, _ = run(capsys, "check", SOLAR, "e", "K[a] p", "--json", "--truth-set")
    report = json.loads(out)
    assert code == 1
    assert report["verdict"] is False and report["truth_set"] == ["j", "s"]
    assert set(report["inputs"]) == {"model"} and len(report["inputs"]["model"]) == 64
    assert "seconds" not in report
    run(capsys, "check", SOLAR, "e", "K[a] p", "--json", "--timing")


def test_reports_are_byte_identical_across_runs(capsys):
    first = run(capsys, "check", FIG1, "w2", "da[c] K[c] p3", "--json", "--truth-set")
    second = run(capsys, "check", FIG1, "w2", "da[c] K[c] p3", "--json", "--truth-set")
    assert first == second


def test_validate(capsys, tmp_path):
    assert run(capsys, "validate", SOLAR) == (0, "ok\n", "")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"worlds": ["x", "y"],
                               "edges": [{"between": ["x", "y"], "full": True}]}))
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and out.startswith("positivity")


@pytest.mark.parametrize("graph, winner", [
    ({"nodes": ["d1", "d2"], "edges": [], "root": "d1"}, "PlayerII"),
    ({"nodes": ["d1", "d2"], "edges": [["d1", "d2"]], "root": "d1"}, "PlayerI"),
])
def test_ueg_small(capsys, tmp_path, graph, winner):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(graph))
    code, out, _ = run(capsys, "ueg", str(path), "--json")
    report = json.loads(out)
    assert code == 0 and report["agree"] and report["winner"] == winner


def test_ueg_fixture(capsys):
    code, out, _ = run(capsys, "ueg", fixture_path("g0.json"), "--variant", "minus")
    assert code == 0 and "agree true" in out


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", "cu-to-cpdl", "K[a] p")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("([a]p & [univ]")
    assert lines[1:] == ["|phi| = 3", "|rho| = 255"]
    code, out, _ = run(capsys, "reduce", "ku2-to-lu", "K[a] q")
    assert "K[f_1_a] K[f_2_a] (f_p -> q)" in out


def test_abstract(capsys, tmp_path):
    target = tmp_path / "solar.json"
    code, _, _ = run(capsys, "abstract", fixture_path("planets.csv"),
                     fixture_path("solar_overlay.json"), "-o", str(target))
    assert code == 0
    with open(SOLAR) as fh:
        assert target.read_text() == fh.read()
    code, out, _ = run(capsys, "abstract", fixture_path("planets.csv"))
    assert code == 0 and json.loads(out)["capabilities"] == {}


def test_abstract_ragged_table(capsys, tmp_path):
    csv = tmp_path / "t.csv"
    csv.write_text("id,x,y\nA,1\n")
    code, _, err = run(capsys, "abstract", str(csv))
    assert code == 2 and "cells" in err


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--pairs", "10")
    assert code == 0 and out.strip().endswith("0 failure(s)")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "skilllogic", "check", SOLAR, "e", "p"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "true\n"
