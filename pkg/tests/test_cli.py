from __future__ import annotations

import json
import subprocess
import sys

import pytest

from garlat.cli import EXIT_CAP, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, EXIT_PARSE, main
from garlat.garside import braid_germ, mutate
from garlat.order import GradedRelation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.startswith("{") else out)


def test_nf(capsys):
    code, rep = run(capsys, "nf", "--germ", "braid:3", "--word", "a b a")
    assert code == EXIT_OK and rep["delta_power"] == 1 and rep["text"] == "Δ^1"
    assert rep["schedule_independent"]


def test_gcd_lcm(capsys):
    code, rep = run(capsys, "gcd", "--germ", "braid:3", "--word", "a b", "--word", "b a")
    assert code == EXIT_OK and rep["factors"] == [] and rep["delta_power"] == 0
    code, rep = run(capsys, "lcm", "--germ", "braid:3", "--word", "a", "--word", "b")
    assert code == EXIT_OK and rep["delta_power"] == 1


def test_germ_check(capsys, tmp_path):
    code, rep = run(capsys, "germ", "check", "--germ", "braid:4")
    assert code == EXIT_OK and rep["ok"]
    bad = tmp_path / "bad.json"
    bad.write_text(mutate(braid_germ(3), "length").to_json())
    code, rep = run(capsys, "germ", "check", "--file", str(bad))
    assert code == EXIT_FAIL and not rep["ok"]


def test_wm_pass_and_fail(capsys):
    code, rep = run(capsys, "wm", "--instance", "free-abelian:3", "--quotient", "--radius", "3")
    assert code == EXIT_OK and rep["ok"]
    code, rep = run(capsys, "wm", "--instance", "cycle:5")
    assert code == EXIT_FAIL and rep["summary"]["fail"] > 0


def test_replay(capsys, tmp_path):
    path = tmp_path / "c6.json"
    code = main(["wm", "--instance", "cycle:6", "--out", str(path)])
    assert code == EXIT_FAIL
    code, rep = run(capsys, "replay", "--report", str(path), "--instance", "cycle:6")
    assert code == EXIT_OK
    assert rep["replayed"] == 6 and rep["confirmed"] == 6


def test_balls(capsys):
    code, rep = run(capsys, "quotient-ball", "--germ", "braid:3", "--radius", "3")
    assert code == EXIT_OK and rep["vertices"] == 29
    code, rep = run(capsys, "cayley-ball", "--germ", "braid:3", "--radius", "2")
    assert code == EXIT_OK and rep["vertices"] > 1


def test_graph_text_output(capsys):
    code, text = run(capsys, "quotient-ball", "--instance", "free-abelian:2", "--radius", "1", "--format", "text")
    assert code == EXIT_OK and text.startswith("# center:")
    code, text = run(capsys, "quotient-ball", "--instance", "free-abelian:2", "--radius", "1", "--format", "dot")
    assert text.startswith("graph")


def test_order_check(capsys, tmp_path):
    lo, mid, hi = ["p", "q"], ["m1", "m2"], ["M1", "M2"]
    pairs = [(a, b, 1) for a in lo for b in mid] + [(a, b, 1) for a in mid for b in hi] + [(a, b, 2) for a in lo for b in hi]
    path = tmp_path / "bowtie.json"
    path.write_text(GradedRelation.from_pairs(lo + mid + hi, pairs).to_json())
    code, rep = run(capsys, "order", "check", "--file", str(path))
    assert code == EXIT_FAIL and not rep["lattice"]["is_lattice"]


def test_dict_commands(capsys, tmp_path):
    flag = tmp_path / "flag.json"
    assert main(["dict", "to-flag", "--instance", "free-abelian:2", "--radius", "2", "--out", str(flag)]) == EXIT_OK
    code, rep = run(capsys, "dict", "to-order", "--file", str(flag))
    assert code == EXIT_OK
    code, rep = run(capsys, "dict", "roundtrip", "--instance", "braid:3", "--radius", "2")
    assert code == EXIT_OK and rep["unsound"] == [] and rep["incomplete"] == []
    code, rep = run(capsys, "dict", "typed-a2", "--instance", "coxeter", "--radius", "2")
    assert code == EXIT_OK


def test_building_commands(capsys):
    code, rep = run(capsys, "building", "ball", "--n", "3", "--q", "2", "--radius", "2")
    assert code == EXIT_OK and rep["vertices"] == 113
    code, rep = run(capsys, "building", "germ", "--n", "3", "--q", "2")
    assert code == EXIT_OK and rep["ok"]
    code, rep = run(capsys, "building", "wm", "--n", "2", "--q", "2", "--radius", "3")
    assert code == EXIT_OK


def test_exit_codes(capsys, tmp_path):
    assert main(["wm", "--instance", "nonsense:1"]) == EXIT_CONFIG
    assert main(["wm", "--instance", "free-abelian:4", "--radius", "6", "--caps", "50"]) == EXIT_CAP
    bad = tmp_path / "g.txt"
    bad.write_text("this is not a graph\n")
    assert main(["wm", "--file", str(bad)]) == EXIT_PARSE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_byte_identical_reruns(tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        assert main(["wm", "--instance", "braid:3", "--quotient", "--radius", "3", "--seed", "1", "--out", str(p)]) == EXIT_OK
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "garlat", "nf", "--germ", "braid:3", "--word", "a b"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and json.loads(r.stdout)["factors"] == ["ab"]
