import json
import pathlib
import subprocess
import sys

import pytest

from galois_lift import cli, ledger
from galois_lift.cli import COMMANDS, run

RAM5 = {"ell": 5, "q": 2, "tau": [[1, 1], [0, 1]], "sigma": [[2, 0], [0, 1]]}
GOLDEN = pathlib.Path(__file__).parent / "golden"


def call(command, data, *extra):
    return run([command, "--input", json.dumps(data), *extra])


def test_every_subcommand_is_wired():
    assert set(COMMANDS) == set(cli.HANDLERS)


def test_tame_lift_report():
    code, rep = call("tame-lift", RAM5, "--precision", "2")
    assert code == 0 and rep["schema_version"] == "1.0"
    assert rep["verification"]["relation_exact"] is True
    assert rep["result"]["modulus"] == 25 and rep["input"] == RAM5


def test_verify_only_stops_before_lifting():
    code, rep = call("tame-lift", RAM5, "--verify-only")
    assert code == 0 and "lifted" not in rep["result"]
    bad = dict(RAM5, tau=[[2, 0], [0, 1]], sigma=[[1, 0], [0, 1]])
    assert call("tame-lift", bad, "--verify-only")[0] == 2


def test_validate_reports_violating_entries():
    bad = dict(RAM5, tau=[[2, 0], [0, 1]], sigma=[[1, 0], [0, 1]])
    code, rep = call("validate", {"object": "pair", "data": bad})
    assert code == 2
    v = rep["violations"][0]
    assert v["kind"] == "relation_fails" and v["entries"] == [[0, 0]]
    assert call("validate", {"object": "pair", "data": RAM5})[0] == 0


@pytest.mark.parametrize("obj,data", [
    ("module", {"ell": 5, "q": 2, "phi": [[1]], "iota": [[2]]}),
    ("group", {"ell": 5, "table": [[0, 0], [0, 0]], "action": [[[1]], [[1]]]}),
    ("det_target", {"ell": 5, "m": 2, "q": 2, "on_sigma": 6, "on_tau": 7}),
    ("global_problem", {"N": 3, "places": [{"label": "x", "kind": "real", "dim_T": 1}]}),
    ("nonsense", {}),
])
def test_validate_rejects(obj, data):
    code, rep = call("validate", {"object": obj, "data": data})
    assert code == 2 and rep["violations"]


def test_main_ledger_fields():
    code, rep = call("main-ledger", {"N": 3, "degree": 1, "m": 1})
    r = rep["result"]
    assert code == 0 and (r["ell_term"], r["infinity_term"], r["margin"]) == (8, 4, 4)


def test_other_subcommands():
    assert call("type-of", RAM5)[1]["result"]["type"] == [{"orbit": [1], "exponents": [2]}]
    code, rep = call("cohomology", {"pair": RAM5, "construction": "ad0"})
    assert code == 0 and rep["result"]["h1_formula"] == rep["result"]["h1_oracle"]
    triv = {"ell": 7, "q": 2, "tau": [[1]], "sigma": [[1]]}
    code, rep = call("hom-vanish", {"pair1": triv, "pair2": dict(triv, sigma=[[3]])})
    assert code == 0 and rep["result"]["vanishes"]
    code, rep = call("ledger", {"N": 3, "places": [
        {"label": "v", "kind": "above_ell", "dim_T": 8, "dim_h0": 0},
        {"label": "inf", "kind": "real", "dim_h0": 4}]})
    assert code == 0 and rep["result"]["wiles_difference"] == 4
    code, rep = call("big-check", {"ell": 7, "N": 3, "degree": 1, "gl3_cos2pi7_excluded": True})
    assert code == 0 and rep["result"]["big"]


def test_cocycle_search_single_and_multi():
    grp = {"ell": 5, "table": [[0]], "action": [[[1]]]}
    code, rep = call("cocycle-search", {"group": grp, "m": 1, "V": [[1]], "g": 0})
    assert code == 0 and rep["result"]["exhaustive_witness_count"] == 4
    assert rep["verification"]["greedy_in_exhaustive_set"]
    a = {"ell": 7, "generators": [[[2]]]}
    b = {"ell": 7, "generators": [[[4]]]}
    code, rep = call("cocycle-search", {"g": 0, "instances": [{"group": a, "V": [[1]]}, {"group": b, "V": [[1]]}]})
    assert code == 0 and len(rep["result"]["parts"]) == 2
    code, rep = call("cocycle-search", {"g": 0, "instances": [{"group": a, "V": [[1]]}, {"group": a, "V": [[1]]}]})
    assert code == 2 and rep["violations"][0]["kind"] == "modules_equivalent"


@pytest.mark.parametrize("argv", [
    ["tame-lift", "--input", "{not json"],
    ["tame-lift", "--input", "/nonexistent/file.json"],
    ["tame-lift", "--input", "[1, 2]"],
    ["tame-lift", "--input", json.dumps({"ell": 5, "q": 2})],
    ["big-check", "--input", json.dumps({"bogus": 1})],
])
def test_schema_and_io_errors_exit_2(argv):
    code, rep = run(argv)
    assert code == 2 and rep["status"] == "invalid_input" and rep["violations"]


def test_failed_recheck_exits_3(monkeypatch):
    real = ledger.main_theorem_ledger

    def broken(*a, **kw):
        out = real(*a, **kw)
        out["margin"] += 1
        return out

    monkeypatch.setattr(ledger, "main_theorem_ledger", broken)
    code, rep = call("main-ledger", {"N": 3})
    assert code == 3 and rep["status"] == "internal_defect" and rep["residual"]["failed"]


def test_output_flag_and_console_script(tmp_path):
    out = tmp_path / "r.json"
    inp = tmp_path / "in.json"
    inp.write_text(json.dumps(RAM5))
    proc = subprocess.run([sys.executable, "-m", "galois_lift.cli", "tame-lift", "-i", str(inp), "-o", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""
    assert json.loads(out.read_text())["verification"]["relation_exact"]
    proc = subprocess.run([sys.executable, "-m", "galois_lift.cli", "validate", "-i",
                           json.dumps({"object": "pair", "data": dict(RAM5, q=5)})], capture_output=True, text=True)
    assert proc.returncode == 2


def test_seeded_runs_are_byte_identical():
    from galois_lift.jsonio import dumps
    data = {"group": {"ell": 5, "generators": [[[-1, 1], [0, 1]], [[0, -1], [1, -1]]]}, "m": 1, "V": [[1]], "g": 0}
    for seed in ("0", "7"):
        a = dumps(call("cocycle-search", data, "--seed", seed)[1])
        b = dumps(call("cocycle-search", data, "--seed", seed)[1])
        assert a == b
