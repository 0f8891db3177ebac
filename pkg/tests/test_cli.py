import json
import math
import subprocess
import sys

import pytest

from approxsubmod import SetFunction
from approxsubmod.apps import build_ask, build_cuflp
from approxsubmod.cli import main
from approxsubmod.setfn import save_json


@pytest.fixture
def cornuejols_json(tmp_path):
    p = tmp_path / "fn.json"
    save_json(build_cuflp(math.inf)[1], p)
    return p


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_demo_ask(capsys):
    assert main(["demo", "ask"]) == 0
    out = capsys.readouterr().out
    assert "objective 11" in out and "x = [1, 1, 1, 0, 0, 1]" in out
    assert "F = 28.300000" in out and "violates cut: True" in out


def test_demo_cuflp(capsys):
    assert main(["demo", "cuflp", "--t", "1"]) == 0
    out = capsys.readouterr().out
    assert "D' = 25" in out and "n D' = 175" in out
    assert f"eps_H = {25 / 384:.12g}" in out


def test_metrics(cornuejols_json, capsys):
    assert main(["metrics", str(cornuejols_json)]) == 0
    out = _json_out(capsys)
    assert out["flags"]["submodular"] and out["marginal"]["value"] == 0


def test_missing_file_is_input_error(tmp_path, capsys):
    assert main(["metrics", str(tmp_path / "missing.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_bad_table_is_input_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"n": 2, "values": [0, 1, 1]}))
    assert main(["metrics", str(p)]) == 2


def test_greedy_bounds(cornuejols_json, capsys):
    assert main(["greedy", str(cornuejols_json), "-K", "4", "-L", "4", "--bounds", "all"]) == 0
    out = _json_out(capsys)
    bounds = {b["name"]: b["value"] for b in out["bounds"]}
    assert out["greedy_value"] == 525 and out["opt_value"] == 768
    assert bounds["delta"] == 525 and bounds["nemhauser"] == 525
    assert main(["greedy", str(cornuejols_json), "-K", "4", "-L", "2", "--bounds", "none"]) == 0
    assert _json_out(capsys)["chosen"] == [1, 2]


def test_global_options_after_subcommand(cornuejols_json, tmp_path):
    out = tmp_path / "r.json"
    assert main(["greedy", str(cornuejols_json), "-K", "2", "-L", "2", "--out", str(out), "--threads", "2"]) == 0
    assert json.loads(out.read_text())["greedy_value"] == 336
    out.unlink()
    assert main(["--seed", "3", "--out", str(out), "extensions", str(cornuejols_json),
                 "--check", "sandwich", "--points", "20"]) == 0
    assert json.loads(out.read_text())["pass"]


def test_extensions_checks(cornuejols_json, capsys):
    assert main(["extensions", str(cornuejols_json), "--check", "upconcave", "--trials", "200"]) == 0
    assert _json_out(capsys)["pass"]
    assert main(["extensions", str(cornuejols_json), "--check", "hessian", "--points", "5"]) == 0
    assert _json_out(capsys)["pass"]


def test_cuts_cover_valid(tmp_path, capsys):
    ask = build_ask()
    p = tmp_path / "k.json"
    p.write_text(json.dumps({"n": 6, "values": ask.f.values.tolist(), "b": ask.b, "c": ask.c.tolist()}))
    assert main(["cuts", "cover", str(p), "--set", "1,2,3,4", "--perm", "5,6"]) == 0
    out = _json_out(capsys)
    assert out["coeffs"] == [1, 1, 1, 1, 1, 0] and out["rhs"] == 3 and out["certificate"]["valid"]


def test_cuts_cover_invalid_exit_3(tmp_path, capsys):
    f = SetFunction(3, [0, 1, 1, 10, 0.5, 1.5, 1.5, 12])
    p = tmp_path / "k.json"
    p.write_text(json.dumps({"n": 3, "values": f.values.tolist(), "b": 9, "c": [1, 1, 1]}))
    assert main(["cuts", "cover", str(p), "--set", "1,2", "--perm", "3"]) == 3
    out = _json_out(capsys)
    assert not out["certificate"]["valid"] and out["certificate"]["max_violation"] == 1


def test_cuts_wrong_instance_kind(tmp_path):
    p = tmp_path / "e.json"
    p.write_text(json.dumps({"phi": {"kind": "power", "p": 2}, "c": [1, 1], "sigma": 0}))
    assert main(["cuts", "cover", str(p), "--set", "1"]) == 2
    assert main(["cuts", "epigraph", str(p), "--perm", "2,1"]) == 0


def test_experiments_write_files(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["experiment", "bounds", "--t", "1,2", "-K", "1-3", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 7
    d = tmp_path / "ml"
    assert main(["experiment", "multilinear", "--bonus", "0,4", "--grid", "5", "--out", str(d)]) == 0
    names = sorted(p.name for p in d.iterdir())
    assert names == ["multilinear_grid_bonus0.csv", "multilinear_grid_bonus4.csv",
                     "multilinear_slice_bonus0.csv", "multilinear_slice_bonus4.csv"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "approxsubmod.cli", "demo", "ask"], capture_output=True, text=True)
    assert r.returncode == 0 and "objective 11" in r.stdout
