import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from omv.cli import EXIT_CODES, exit_code, main
from omv.search.search import clear_cache

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_suite_simplified_k_writes_mc_countermodel(tmp_path):
    path = tmp_path / "out.json"
    code, text = run("suite", "simplified_k", "--json", str(path))
    assert code == 0, text
    data = json.loads(path.read_text())
    assert data["schema"] == "omv-suite-report/1"
    mc = [c for c in data["cases"] if c["check"] == "refute" and c["conjecture"] == "MC"]
    assert mc and all(c["outcome"] == "pass" for c in mc)
    assert all(c["model"]["worlds"] == 2 for c in mc)


def test_entail_theorem3p_holds():
    code, text = run("entail", "builtin:simplified_k", "THEOREM3P", "--max-worlds", "2", "--max-indiv", "2")
    assert code == 0
    assert "NoCounterexampleUpTo" in text
    assert "not a proof" in text


def test_entail_coro_fails_with_dead_end_world():
    code, text = run("entail", "builtin:simplified_k", "CORO")
    assert code == 1
    assert "CounterexampleFound" in text
    assert "worlds: 1" in text and "w0 -> (none)" in text


def test_refute_and_find_model_codes():
    assert run("refute", "simplified_kt", "MC")[0] == 0
    assert run("refute", "simplified_k", "THEOREM3P", "--max-worlds", "1")[0] == 1
    assert run("find-model", "simplified_k")[0] == 0
    assert run("find-model", "goedel_kb_possibilist", "--max-worlds", "1", "--max-indiv", "1")[0] == 1


def test_premises_restrict_axioms():
    code, text = run("entail", "simplified_k", "LEMMA1", "--premises", "CORO2", "--max-worlds", "1")
    assert code == 0, text
    assert run("entail", "simplified_k", "LEMMA1", "--premises", "NOPE")[0] == 2


def test_exit_code_table():
    assert exit_code("entail", "TimedOut") == 3
    assert {v for v in EXIT_CODES.values()} == {0, 1}
    assert exit_code("refute", "CounterexampleFound") == 0
    assert exit_code("find-model", "UnsatisfiableUpTo") == 1


def test_verify_model_round_trip(tmp_path):
    path = tmp_path / "mc.json"
    assert run("refute", "builtin:simplified_kt", "MC", "--json", str(path))[0] == 0
    code, text = run("verify-model", str(path))
    assert code == 0, text
    assert "matches" in text
    data = json.loads(path.read_text())
    assert data["model"]["access"] == [[0, 0], [1, 0], [1, 1]]
    # the same model is also a K-countermodel
    assert run("verify-model", str(path), "builtin:simplified_k", "--logic", "K")[0] == 0


def test_verify_model_detects_broken_reflexivity(tmp_path):
    path = tmp_path / "mc.json"
    run("refute", "builtin:simplified_kt", "MC", "--json", str(path))
    data = json.loads(path.read_text())
    data["model"]["access"] = [[1, 0]]
    path.write_text(json.dumps(data))
    code, text = run("verify-model", str(path))
    assert code == 1
    assert "VIOLATED" in text


def test_hand_entered_mc_countermodel_verifies():
    code, text = run("verify-model", str(FIXTURES / "mc_countermodel_by_hand.json"))
    assert code == 0, text
    assert "MC: not valid" in text


def test_schema_mismatch_is_usage_error(tmp_path):
    path = tmp_path / "bad.json"
    data = json.loads((FIXTURES / "mc_countermodel_by_hand.json").read_text())
    data["schema"] = "omv-report/0"
    path.write_text(json.dumps(data))
    assert run("verify-model", str(path))[0] == 2
    path.write_text("{not json")
    assert run("verify-model", str(path))[0] == 2


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.mthy"
    bad.write_text("theory t\nconst P : (i>wo)>wo\naxiom a : P (\\x. \n")
    assert run("check", str(bad))[0] == 2
    err = capsys.readouterr().err
    assert "bad.mthy:4:1" in err and "expected" in err


def test_usage_errors():
    assert run()[0] == 2
    assert run("entail", "builtin:simplified_k")[0] == 2
    assert run("find-model", "/nonexistent/theory.mthy")[0] == 2
    assert run("find-model", "simplified_k", "--max-worlds", "0")[0] == 2
    assert run("suite", "no_such_group")[0] == 2


def test_bound_overflow_and_timeout_exit_3():
    assert run("find-model", "simplified_k", "--max-worlds", "3")[0] == 3
    clear_cache()
    code, text = run(
        "entail", "simplified_k_actualist", "LEMMA1", "--max-worlds", "2", "--max-indiv", "2", "--timeout", "0.01"
    )
    assert code == 3
    assert "TimedOut" in text


def test_json_to_stdout():
    code, text = run("find-model", "simplified_k", "--json", "-")
    assert code == 0
    data = json.loads(text)
    assert data["verdict"] == "ModelFound"
    assert data["decisions"]["consequence"] == "global"


def test_parse_list_and_check():
    code, text = run("parse", "builtin:scott_kb_possibilist")
    assert code == 0 and text.startswith("theory scott_kb_possibilist")
    code, text = run("list")
    assert code == 0 and "simplified_k " in text
    assert run("check", "simplified_k_empty")[0] == 0


def test_overrides_are_recorded():
    code, text = run("find-model", "simplified_k", "--logic", "KT", "--quant", "actualist", "--json", "-")
    data = json.loads(text)
    assert data["logic"] == "KT" and data["quant"] == "actualist"
    assert data["overrides"]


@pytest.mark.parametrize("argv, expected", [(["entail", "simplified_k", "CORO"], 1), (["list"], 0)])
def test_module_entry_point(argv, expected):
    proc = subprocess.run([sys.executable, "-m", "omv.cli", *argv], capture_output=True, text=True, timeout=300)
    assert proc.returncode == expected, proc.stderr
