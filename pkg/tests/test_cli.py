import json

import pytest

from continlab.cli import main

LIGHT = ["--grid", "61", "--lambda", "101", "--samples", "120"]


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_check_holds_is_zero(capsys):
    code, out = run(capsys, "check", "--subject", "gp-relation", "--property", "mixture-continuous", *LIGHT)
    assert code == 0 and "mixture-continuous: Holds" in out.out


def test_check_fails_is_one(capsys):
    code, out = run(capsys, "check", "--subject", "gp-function", "--property", "joint-continuity",
                    "--format", "json", *LIGHT)
    assert code == 1
    doc = json.loads(out.out)
    assert doc["schema"] == "continlab/1"
    assert doc["reports"][0]["verdict"] == "Fails" and doc["reports"][0]["witnesses"]


def test_fails_outranks_unresolved(capsys):
    code, _ = run(capsys, "check", "--subject", "gp-function", "--property", "joint-continuity",
                  "linear-continuity", "--grid", "61", "--lambda", "5", "--samples", "60")
    assert code == 1


def test_unresolved_is_two(capsys):
    code, out = run(capsys, "check", "--subject", "gp-function", "--property", "linear-continuity",
                    "--grid", "61", "--lambda", "5", "--samples", "60")
    assert code == 2 and "Unresolved" in out.out


@pytest.mark.parametrize("argv", [
    ["check", "--subject", "nope"],
    ["check", "--subject", "gp-function", "--property", "made-up"],
    ["check", "--subject", "gp-function", "--tol", "-1"],
    ["corpus", "--subset", "nope"],
    ["deduce", "--subject", "gp-relation", "--assert", "wishful"],
    ["frobnicate"],
])
def test_usage_errors_are_three(capsys, argv):
    assert main(argv) == 3


def test_bad_config_file(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text('{"grid_resolution": 61, "bogus": 1}')
    assert main(["corpus", "--subset", "ex3-integer-additive", "--config", str(p)]) == 3


def test_config_file_and_corpus(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"grid_resolution": 61, "lambda_resolution": 101, "sample_count": 120}))
    out = tmp_path / "report.json"
    assert main(["corpus", "--subset", "ex3-integer-additive", "--config", str(p),
                 "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["grid_resolution"] == 61 and doc["summary"]["pass"]


def test_subject_file(tmp_path, capsys):
    p = tmp_path / "rel.json"
    p.write_text(json.dumps({"variant": "utility", "utility": "x1 + x2",
                             "domain": {"variant": "box", "lower": [0, 0], "upper": [1, 1]}}))
    code, out = run(capsys, "check", "--subject", str(p), "--property", "complete", "transitive", *LIGHT)
    assert code == 0


def test_deduce(capsys):
    code, out = run(capsys, "deduce", "--subject", "gp-relation", *LIGHT)
    assert code == 0 and "CONTRADICTION" not in out.out
    code, out = run(capsys, "deduce", "--subject", "gp-relation", "--assert",
                    "property-C,convex-upper-sections", *LIGHT)
    assert code == 1 and "CONTRADICTION continuous: derived DerivedHolds vs direct Fails" in out.out


def test_edges(tmp_path, capsys):
    out = tmp_path / "edges.json"
    assert main(["edges", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "continlab/1" and len(doc["edges"]) >= 30
