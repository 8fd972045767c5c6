import json
import subprocess
import sys
from pathlib import Path

import pytest

from freedl.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json", "--deterministic")
    return code, json.loads(out)


@pytest.fixture
def write(tmp_path):
    def make(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return make


def test_parse_reports_shape(capsys):
    code, rep = run_json(capsys, "parse", DATA / "onto.fdl")
    assert code == 0
    assert rep["cis"] == 2 and rep["individuals"] == ["a"] and rep["verdict"] is None


def test_parse_error_location(capsys, write):
    bad = write("bad.fdl", "modalities: 1\n) A\n")
    code, out, err = run(capsys, "parse", bad, "--json")
    assert code == 2
    rep = json.loads(out)
    assert rep["verdict"] == "error"
    assert rep["location"]["line"] == 2 and rep["location"]["column"] == 1
    assert err.startswith("freedl:")


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "parse", tmp_path / "nope.fdl")
    assert code == 2 and "freedl:" in err


@pytest.mark.parametrize("logic,file", [
    ("alcou", "onto.fdl"), ("ltlf-next", "ltl.fdl"), ("ltl-next", "ltl.fdl"),
    ("kn", "ltl.fdl"), ("s5n", "ltl.fdl"), ("kfn", "ltl.fdl"),
])
def test_sat_exit_zero(capsys, logic, file):
    code, rep = run_json(capsys, "sat", DATA / file, "--logic", logic)
    assert code == 0 and rep["verdict"] == "sat"


def test_unsat_exit_one(capsys, write):
    f = write("u.fdl", "modalities: 1\nbox1 A and dia1 not A\n")
    for logic in ("kn", "s5n"):
        code, rep = run_json(capsys, "sat", f, "--logic", logic)
        assert code == 1 and rep["verdict"] == "unsat"


def test_kfn_budget_verdict(capsys, write):
    f = write("k.fdl", "modalities: 2\ndia2 dia2 dia2 A\n")
    kfn = ("sat", f, "--logic", "kfn", "--domains", "expanding")
    code, rep = run_json(capsys, *kfn, "--budget", "3")
    assert code == 1 and rep["verdict"] == "unsat-up-to-bounds"
    assert rep["bounds"] == "trees with at most 3 worlds"
    code, rep = run_json(capsys, *kfn, "--budget", "4")
    assert code == 0


def test_kfn_constant_domains_use_oracle(capsys, write):
    f = write("k.fdl", "modalities: 2\ndia2 A\n")
    code, rep = run_json(capsys, "sat", f, "--logic", "kfn")
    assert code == 0 and "oracle" in rep["pipeline"][0]


def test_fragment_error(capsys, write):
    f = write("d.fdl", "modalities: 2\ndia2 A\n")
    code, rep = run_json(capsys, "sat", f, "--logic", "ltlf-next")
    assert code == 2 and rep["verdict"] == "error"


def test_partial_rda_concept_falls_back_to_oracle(capsys):
    code, rep = run_json(capsys, "sat", DATA / "rda.fdl", "--logic", "kn", "--rda")
    assert code == 0 and rep["verdict"] == "sat"
    assert "oracle" in rep["pipeline"][0]


def test_oracle_command(capsys, write):
    f = write("o.fdl", "modalities: 1\nA and not A\n")
    code, rep = run_json(capsys, "oracle", f, "--frames", "s5n")
    assert code == 1 and rep["verdict"] == "unsat-up-to-bounds"
    code, rep = run_json(capsys, "oracle", DATA / "rda.fdl", "--witness")
    assert code == 0 and rep["witness"]["worlds"] == [0]


def test_reduce_writes_output(capsys, tmp_path):
    out = tmp_path / "n.fdl"
    code, rep = run_json(capsys, "reduce", "normalize", DATA / "onto.fdl", "-o", out)
    assert code == 0 and out.exists()
    code, rep = run_json(capsys, "parse", out)
    assert code == 0


def test_counting_both_directions(capsys, tmp_path):
    code, rep = run_json(capsys, "counting", "to-alcou", DATA / "count.fdl")
    assert code == 0 and rep["status"] == "translated"
    out = tmp_path / "d.fdl"
    code, rep = run_json(capsys, "counting", "to-diff", DATA / "onto.fdl", "-o", out)
    assert code == 0 and out.exists()


def test_encode_minsky(capsys, tmp_path):
    out = tmp_path / "m1.fdl"
    code, rep = run_json(capsys, "encode", "minsky", DATA / "m1.mm", "-o", out)
    assert code == 0
    assert out.read_text().count("[=") == 12
    code, rep = run_json(capsys, "encode", "minsky", DATA / "m1.mm", "--no-u")
    assert code == 0


def test_work_cap_env(capsys, monkeypatch, write):
    monkeypatch.setenv("FREEDL_WORK_CAP", "1")
    f = write("w.fdl", "modalities: 1\nA and dia1 B and dia1 not B\n")
    code, rep = run_json(capsys, "oracle", f, "--engine", "enumerate", "--worlds", "3")
    assert code == 2 and rep["verdict"] == "budget-exhausted"


def test_deterministic_output_is_stable(capsys):
    a = run(capsys, "sat", DATA / "ltl.fdl", "--logic", "kn", "--json", "--deterministic", "--witness")
    b = run(capsys, "sat", DATA / "ltl.fdl", "--logic", "kn", "--json", "--deterministic", "--witness")
    assert a == b
    assert "seconds" not in json.loads(a[1])


def test_entry_point():
    r = subprocess.run([sys.executable, "-m", "freedl.cli", "sat", str(DATA / "onto.fdl"),
                        "--logic", "alcou"], capture_output=True, text=True)
    assert r.returncode == 0 and "sat" in r.stdout
