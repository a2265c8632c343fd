import json
import subprocess
import sys

import pytest

from invgen.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json", "--no-cache")
    return code, json.loads(out), out


def test_group_info_a5(capsys):
    code, doc, _ = run_json(capsys, "group-info", "A5")
    assert code == 0
    r = doc["result"]
    assert r["k"] == 5 and r["maximal_orders"] == [12, 10, 6] and r["out_order"] == 2
    assert r["frattini_order"] == 1 and r["aut_order"] == 120
    assert doc["schema"].startswith("invgen.") and doc["config"]["command"] == "group-info"


def test_group_info_c6(capsys):
    code, doc, _ = run_json(capsys, "group-info", "C6")
    assert code == 0
    assert doc["result"]["k"] == 6
    # one maximal class per prime divisor of 6
    assert sorted(doc["result"]["maximal_orders"]) == [2, 3]


def test_group_info_s8_is_a_cap_error(capsys):
    code = main(["group-info", "S8", "--no-cache"])
    captured = capsys.readouterr()
    assert code == 2
    assert "CapExceeded" in captured.err


def test_s8_error_report_in_json(capsys):
    code, doc, _ = run_json(capsys, "group-info", "S8")
    assert code == 2 and doc["error"]["type"] == "CapExceeded"


def test_di_a5(capsys):
    code, doc, _ = run_json(capsys, "di", "A5")
    assert code == 0
    assert doc["result"]["dI"] == 2 and len(doc["result"]["witness_classes"]) == 2


def test_invgen_no_with_d10(capsys, tmp_path):
    code, doc, out = run_json(capsys, "invgen", "A5", "(1,2,3,4,5)")
    assert code == 1
    cert = doc["result"]["certificate"]
    assert cert["verdict"] == "no" and cert["refuting_maximal"]["order"] == 10
    path = tmp_path / "cert.json"
    path.write_text(out)
    assert run(capsys, "verify-certificate", str(path))[0] == 0


def test_invgen_yes(capsys):
    code, doc, _ = run_json(capsys, "invgen", "A5", "(1,2,3)", "(1,2,3,4,5)")
    assert code == 0 and doc["result"]["certificate"]["verdict"] == "yes"


def test_tampered_certificate_rejected(capsys, tmp_path):
    _, doc, _ = run_json(capsys, "di", "A5")
    cert = doc["result"]["certificate"]
    cert["maximals"] = cert["maximals"][:1] + [{"order": 60, "generators": cert["generators"]}] + cert["maximals"][2:]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cert))
    code, out = run(capsys, "verify-certificate", str(path))
    assert code == 1 and "REJECTED" in out


def test_bad_inputs_exit_2(capsys, tmp_path):
    assert run(capsys, "di", "D4", "--no-cache")[0] == 2
    assert run(capsys, "invgen", "A5", "(1,2)", "--no-cache")[0] == 2
    assert run(capsys, "di", "S5", "--budget-lattice", "50", "--no-cache")[0] == 2
    assert run(capsys, "mexact", "A5", "5", "--no-cache")[0] == 2
    assert run(capsys, "mexact", "A4", "2", "--no-cache")[0] == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert run(capsys, "verify-certificate", str(tmp_path / "junk.json"))[0] == 2


def test_lemma42_files(capsys, tmp_path):
    equal = tmp_path / "equal.txt"
    equal.write_text("(1,2,3,4,5);(1,2,3,4,5)\n(1,2,3);(1,2,3)\n")
    code, doc, out = run_json(capsys, "lemma42", "A5", str(equal))
    assert code == 1 and doc["result"]["certificate"]["failed"] == "b"
    (tmp_path / "c.json").write_text(out)
    assert run(capsys, "verify-certificate", str(tmp_path / "c.json"))[0] == 0

    good = tmp_path / "good.txt"
    good.write_text("# three rows\n(3,4,5);(3,4,5)\n(1,2,3,4,5);(1,2,3,4,5)\n();(3,4,5)\n")
    code, doc, _ = run_json(capsys, "lemma42", "A5", str(good), "--trials", "200")
    assert code == 0 and doc["result"]["cross_check"]["ok"]


def test_mexact_and_bounds(capsys):
    code, doc, _ = run_json(capsys, "mexact", "A5", "2")
    assert code == 0 and doc["result"]["m_exact"] == 2
    code, doc, _ = run_json(capsys, "bounds", "A5", "2")
    assert code == 0 and doc["result"]["sandwich_holds"] and doc["result"]["three_row_bound_holds"]


@pytest.mark.parametrize("argv", [["group-info", "A5"], ["di", "PSL(2,7)"], ["bounds", "A5", "2"],
                                  ["invgen", "S4", "(1,2,3,4)"]])
def test_cache_hit_matches_recomputation(capsys, tmp_path, argv):
    cache = str(tmp_path / "cache")
    first = run(capsys, *argv, "--format", "json", "--cache-dir", cache)
    assert list((tmp_path / "cache").glob("*.json"))
    second = run(capsys, *argv, "--format", "json", "--cache-dir", cache)
    fresh = run(capsys, *argv, "--format", "json", "--no-cache")
    assert first == second == fresh


def test_cache_key_includes_budgets(capsys, tmp_path):
    cache = str(tmp_path / "cache")
    run(capsys, "di", "A5", "--cache-dir", cache)
    run(capsys, "di", "A5", "--cache-dir", cache, "--budget-lattice", "100")
    assert len(list((tmp_path / "cache").glob("*.json"))) == 2


def test_json_is_deterministic(capsys):
    a = run(capsys, "bounds", "A5", "2", "--format", "json", "--no-cache", "--trials", "50", "--seed", "4")
    b = run(capsys, "bounds", "A5", "2", "--format", "json", "--no-cache", "--trials", "50", "--seed", "4")
    assert a == b


def test_text_output(capsys):
    code, out = run(capsys, "group-info", "A5", "--no-cache")
    assert code == 0 and "maximal subgroup orders: [12, 10, 6]" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "invgen", "di", "A4", "--no-cache"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "d_I(A4) = 2" in proc.stdout
