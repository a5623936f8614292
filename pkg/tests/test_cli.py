import json
import os
import subprocess
import sys

from relcalc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_crosseffect_report(capsys):
    code, rep = run(capsys, "crosseffect", "--functor", "pow(lin,2)", "--tuple", "1,1", "--window", "3")
    assert code == 0
    assert rep["result"]["group"] == {"free_rank": 2, "invariant_factors": []}
    assert rep["tool"] == "relcalc" and rep["command"] == "crosseffect"


def test_degree_report(capsys):
    code, rep = run(capsys, "degree", "--functor", "lin", "--n", "1", "--window", "3")
    assert code == 0
    assert rep["result"]["holds_on_window"] is True
    assert [1, 1] in rep["result"]["checked_tuples"]


def test_compare_towers_report(capsys):
    code, rep = run(
        capsys, "compare-towers", "--functor", "pow(lin,2)", "--n", "1",
        "--window", "3", "--depth", "2", "--point", "1",
    )
    assert code == 0
    res = rep["result"]
    assert res["h0_agreement"] == "exact"
    zero = {"free_rank": 0, "invariant_factors": []}
    assert res["degrees"]["H0"]["relative"] == res["degrees"]["H0"]["cotriple"] == zero


def test_smith_and_homgroup(capsys):
    code, rep = run(capsys, "smith", "--matrix", "[[2,4],[6,8]]")
    assert code == 0 and rep["result"]["invariant_factors"] == [2, 4]
    code, rep = run(capsys, "homgroup", "--source", "Z/4", "--target", "Z/6")
    assert rep["result"]["hom"] == rep["result"]["tensor"] == {"free_rank": 0, "invariant_factors": [2]}


def test_yoneda_check(capsys):
    code, rep = run(capsys, "yoneda-check", "--functor", "sym2(lin)", "--window", "2")
    assert code == 0 and rep["result"]["ok"]


def test_resolve_and_tower(capsys):
    code, rep = run(capsys, "resolve", "--functor", "pow(lin,2)", "--n", "2", "--window", "3", "--depth", "2", "--point", "2")
    assert code == 0
    code, rep = run(capsys, "tower", "--functor", "sym2(lin)", "--window", "3", "--max-n", "2", "--depth", "2", "--point", "1")
    assert code == 0


def test_window_overflow_is_structured(capsys):
    code, rep = run(capsys, "compare-towers", "--functor", "lin", "--n", "1", "--window", "2", "--point", "3")
    assert code == 1
    assert rep["error"] == "window_overflow" and rep["required_window"] == 3
    assert "result" not in rep


def test_usage_errors(capsys):
    assert main(["smith", "--matrix", "[[1,2"]) == 2
    assert main(["degree", "--functor", "lin", "--n", "-1", "--window", "3"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["degree", "--functor", "pow(lin", "--n", "1", "--window", "3"]) == 2


def test_validate_round_trip(tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert main(["crosseffect", "--functor", "sym2(lin)", "--tuple", "1,1", "--window", "2", "--out", str(out)]) == 0
    capsys.readouterr()
    code, rep = run(capsys, "validate", "--input", str(out))
    assert code == 0
    assert rep["result"]["ok"] and rep["result"]["recomputed_equal"]
    # tamper with the payload
    data = json.loads(out.read_text())
    data["result"]["group"]["free_rank"] = 7
    out.write_text(json.dumps(data))
    code, rep = run(capsys, "validate", "--input", str(out))
    assert not rep["result"]["ok"]


def test_byte_identical_runs(tmp_path):
    argv = [sys.executable, "-m", "relcalc.cli", "degree", "--functor", "sym2(lin)", "--n", "1", "--window", "3"]
    outs = []
    for seed in ("0", "7"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        outs.append(subprocess.run(argv, capture_output=True, env=env, check=True).stdout)
    assert outs[0] == outs[1]
