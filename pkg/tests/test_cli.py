import json
import subprocess
import sys

import pytest

from ramsey_exp.cli import main
from ramsey_exp.colorings import random_coloring, save_coloring


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def jrun(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out else None), err


def test_search_monochrome_reduced(capsys):
    code, doc, _ = jrun(capsys, "search", "--pattern", "reduced-exp", "--base", "2", "--monochrome", "--N", "4")
    assert code == 0
    assert doc["result"]["witness"]["span"] == ["1", "2", "4"]
    assert doc["config"]["N"] == 4 and doc["config"]["seed"] == 0


def test_search_parity_none(capsys):
    code, doc, _ = jrun(capsys, "search", "--pattern", "reduced-exp", "--base", "2", "--coloring", "parity", "--N", "15")
    assert code == 1 and doc["result"]["status"] == "none"
    code, doc, _ = jrun(capsys, "search", "--pattern", "reduced-exp", "--base", "2", "--coloring", "parity", "--N", "16")
    assert code == 0 and doc["result"]["color"] == 0


def test_search_missing_file(capsys, tmp_path):
    code, out, err = run(capsys, "search", "--pattern", "exp-triple", "--coloring", f"file:{tmp_path}/nope.txt")
    assert code == 2 and "not found" in err and out == ""


@pytest.mark.parametrize("argv", [
    ["search", "--pattern", "bogus", "--monochrome", "--N", "4"],
    ["search", "--pattern", "schur", "--monochrome", "--N", "4", "--wat"],
    ["search", "--pattern", "schur", "--coloring", "parity"],
    ["frobnicate"],
    [],
])
def test_malformed_inputs_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_coloring_file(capsys, tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("3 2\n0\n5\n1\n")
    code, _, err = run(capsys, "search", "--pattern", "schur", "--coloring", f"file:{p}")
    assert code == 2 and "c.txt:3:" in err


def test_truncated_search_is_not_an_error(capsys):
    code, doc, _ = jrun(capsys, "search", "--pattern", "hindman-tower", "--k", "3", "--cap", "10",
                        "--monochrome", "--N", "262144")
    assert code == 1 and doc["result"]["status"] == "truncated"


def test_counterexample_levels_2(capsys):
    code, doc, _ = jrun(capsys, "counterexample", "--levels", "2")
    assert code == 0
    lv = doc["result"]["tower"]["levels"]
    assert [(l["x"], l["y"]) for l in lv] == [("3", "3"), ("28", "84")]
    assert doc["result"]["all_passed"]
    assert all(r["passed"] for r in doc["result"]["report"])


def test_counterexample_cap_and_members(capsys):
    code, doc, _ = jrun(capsys, "counterexample", "--levels", "4", "--cap", "10000", "--member", "3,4,30")
    assert code == 0 and doc["result"]["no_triple"] == "clean"
    assert doc["result"]["membership"] == {"3": "in", "4": "out", "30": "in"}
    assert run(capsys, "counterexample", "--levels", "5")[0] == 2


def test_threshold_r1(capsys):
    code, doc, _ = jrun(capsys, "threshold", "--pattern", "reduced-exp", "--r", "1", "--base", "2")
    assert code == 0 and doc["result"]["N_star"] == 4
    code, out, _ = run(capsys, "threshold", "--r", "1", "--format", "table")
    assert "N_star\t4" in out


def test_threshold_unresolved(capsys, tmp_path):
    code, doc, _ = jrun(capsys, "threshold", "--r", "2", "--N-hi", "20", "--cache", str(tmp_path / "c.jsonl"))
    assert code == 1 and not doc["result"]["resolved"]


def test_verify_roundtrip_and_tamper(capsys, tmp_path):
    c = random_coloring(200, 2, 5)
    cpath = tmp_path / "c.txt"
    save_coloring(c, cpath)
    for pattern in ("schur", "exp-triple", "reduced-exp", "fs", "fp", "exp-eq", "hindman-tower"):
        w = tmp_path / f"{pattern}.json"
        code, _, _ = run(capsys, "search", "--pattern", pattern, "--coloring", f"file:{cpath}", "--output", str(w))
        if code == 1:
            continue
        assert code == 0
        code, doc, _ = jrun(capsys, "verify", "--certificate", str(w), "--coloring", f"file:{cpath}")
        assert code == 0 and doc["result"]["valid"]
    doc = json.loads((tmp_path / "schur.json").read_text())
    gens = doc["result"]["witness"]["generators"]
    doc["result"]["witness"]["generators"] = [gens[0], str(int(gens[1]) + 1)]
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    code, out, _ = jrun(capsys, "verify", "--certificate", str(tmp_path / "bad.json"), "--coloring", f"file:{cpath}")
    assert code == 1 and out["result"]["reason"]


def test_largeness(capsys):
    code, doc, _ = jrun(capsys, "largeness", "--notion", "add-thick", "--set", "1,5-9", "--N", "10", "--L", "5")
    assert code == 0 and doc["result"]["holds"]
    code, doc, _ = jrun(capsys, "largeness", "--notion", "add-syndetic", "--coloring", "parity", "--N", "20", "--g", "1")
    assert code == 1 and doc["result"]["gap"] == 2


def test_extract(capsys):
    code, doc, _ = jrun(capsys, "extract", "--seed", "3")
    assert code == 0 and doc["result"]["witness"]["kind"] == "reduced_exp"
    code, doc, _ = jrun(capsys, "extract", "--instance", "full", "--N", "64")
    assert code == 0


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run\npattern=reduced-exp\ncoloring=parity\nN=15\nbase=2\n")
    assert run(capsys, "search", "--config", str(cfg))[0] == 1
    assert run(capsys, "search", "--config", str(cfg), "--N", "16")[0] == 0
    cfg.write_text("pattern=schur\nnonsense=1\n")
    assert run(capsys, "search", "--config", str(cfg), "--monochrome", "--N", "3")[0] == 2


def test_output_is_deterministic(capsys):
    argv = ["search", "--pattern", "schur", "--coloring", "random", "--N", "150", "--colors", "3", "--seed", "99"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b
    assert '"seed": 99' in a[1]
    c = run(capsys, *argv[:-1], "100")
    assert c[1] != a[1]


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "ramsey_exp.cli", "counterexample", "--levels", "2", "--format", "table"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "# levels=2" in out.stdout
