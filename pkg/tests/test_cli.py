import json
import os
import subprocess
import sys

import pytest

from treeprops import acceptance, cli
from treeprops.modelc import chain_structure


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_antichain_count(capsys):
    assert run(capsys, "antichains", "--depth", "4", "--count") == (0, "26\n", "")


def test_antichain_listing(capsys):
    code, out, _ = run(capsys, "antichains", "--depth", "2")
    assert code == 0 and out.splitlines() == ["{e}", "{0, 1}"]


def test_json_is_deterministic(capsys):
    a = run(capsys, "antichains", "--depth", "3", "--json")[1]
    b = run(capsys, "antichains", "--depth", "3", "--json")[1]
    assert a == b
    obj = json.loads(a)
    assert obj["format"] == 1 and obj["count"] == 5


def test_structure_build_verify_search(tmp_path, capsys):
    path = str(tmp_path / "c3.json")
    assert run(capsys, "structure", "build", "--depth", "3", "--out", path)[0] == 0
    code, out, _ = run(capsys, "structure", "verify", "--in", path, "--checks", "prop62,remark63,remark64")
    assert code == 0
    code, out, _ = run(capsys, "structure", "verify", "--in", path, "--checks", "phi", "--json")
    assert code == 1 and json.loads(out)["checks"]["phi-semantics"]["clause"] == "predecessor"
    code, out, _ = run(capsys, "structure", "search-sop2", "--in", path, "--conj", "1")
    assert code == 1 and out.startswith("none")
    code, _, _ = run(capsys, "structure", "search-sop2", "--in", path, "--budget", "3")
    assert code == 4


def test_check_exit_codes(tmp_path, capsys):
    p = tmp_path / "o.json"
    p.write_text(json.dumps({"kind": "synthetic", "rule": "atp", "depth": 3}))
    assert run(capsys, "check", "--oracle", str(p), "--property", "atp")[0] == 0
    code, out, _ = run(capsys, "check", "--oracle", str(p), "--property", "sop2", "--json")
    assert code == 1 and json.loads(out)["report"]["pass"] is False


def test_check_tp2(tmp_path, capsys):
    p = tmp_path / "g.json"
    inner = {"kind": "synthetic", "rule": "atp", "depth": 5}
    p.write_text(json.dumps({"kind": "pullback", "map": "tp2_from_at", "antichain": ["00", "01", "10"], "inner": inner}))
    assert run(capsys, "check", "--oracle", str(p), "--property", "tp2", "--m", "3")[0] == 0


def test_map_commands(tmp_path, capsys):
    assert run(capsys, "map", "apply", "--name", "at_embed", "--node", "00") == (0, "1001001\n", "")
    out = tmp_path / "t.json"
    assert run(capsys, "map", "table", "--name", "sop1_from_at", "--depth", "2", "--out", str(out))[0] == 0
    assert json.loads(out.read_text())["table"]["1"]


def test_classify(capsys):
    assert run(capsys, "classify", "--nodes", "1,01") == (0, "bad_pair (1, 01)\n", "")
    assert run(capsys, "classify", "--nodes", "e 0 00")[1] == "chain\n"


def test_mono(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"depth": 4, "branching": 2, "colors": {"e": 1}, "default": 0}))
    code, out, _ = run(capsys, "mono", "dense", "--coloring", str(p))
    assert code == 0 and out == "e 0\n"
    assert run(capsys, "mono", "embed", "--coloring", str(p), "--height", "2")[0] == 0
    assert run(capsys, "mono", "embed", "--coloring", str(p), "--height", "4")[0] == 1


def test_levelsets(capsys):
    code, out, _ = run(capsys, "levelsets", "--i", "2", "--k", "3")
    assert code == 0 and "m    = 1001001111" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["antichains"],
        ["antichains", "--depth", "x"],
        ["classify", "--nodes", "0,2x"],
        ["map", "apply", "--name", "nope", "--node", "0"],
        ["selftest", "--quick", "--only", "nope"],
    ],
)
def test_usage_errors(argv, capsys):
    assert cli.run(argv) == 2


def test_bad_input_files(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.run(["structure", "verify", "--in", str(bad)]) == 3
    assert cli.run(["structure", "verify", "--in", str(tmp_path / "missing.json")]) == 3
    bad.write_text(json.dumps({"depth": 2}))
    assert cli.run(["check", "--oracle", str(bad), "--property", "atp"]) == 3


def test_resource_error(capsys):
    assert cli.run(["structure", "build", "--depth", "7", "--out", "/dev/null"]) == 4


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "x.json"
    target.write_text("old")
    cli.write_atomic(str(target), "new")
    assert target.read_text() == "new"
    assert os.listdir(tmp_path) == ["x.json"]


def test_selftest_quick(capsys):
    code, out, _ = run(capsys, "selftest", "--quick")
    assert code == 0 and out.count("PASS") == len(acceptance.QUICK)


def test_selftest_names_first_failure(monkeypatch, capsys):
    monkeypatch.setattr(acceptance, "build_structure", chain_structure)
    code, out, _ = run(capsys, "selftest", "--quick", "--json")
    obj = json.loads(out)
    assert code == 1 and obj["first_failure"] == "q-structure"


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "treeprops", "antichains", "--depth", "3", "--count"], capture_output=True, text=True
    )
    assert r.returncode == 0 and r.stdout.strip() == "5"
