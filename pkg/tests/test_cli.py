import csv
import io
import json
import subprocess
import sys

import pytest

from qipsim.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_classical_run_honest_true(capsys):
    doc = run_json(
        capsys, "classical", "run",
        "--formula", "A x1 E x2 : (x1 | ~x2) & (~x1 | x2)",
        "--k", "4", "--trials", "100", "--seed", "1",
    )
    assert doc["command"] == "classical run"
    res = doc["result"]
    assert res["accepted"] == 100 and res["trials"] == 100
    assert res["acceptance"]["rational"] == "1/1"
    assert res["N"] == 5 and res["k"] == 4
    assert len(res["per_trial"]) == 100
    assert doc["config"]["k"] == 4


def test_classical_run_optimal_reports_value(capsys):
    doc = run_json(
        capsys, "classical", "run", "--formula", "A x1 : x1",
        "--k", "4", "--prover", "optimal", "--trials", "16",
    )
    res = doc["result"]
    assert res["optimal_acceptance"]["rational"] == "23/128"
    assert res["soundness_cap"]["rational"] == "1/4"


def test_classical_exhaustive_modes(capsys):
    doc = run_json(
        capsys, "classical", "exhaustive",
        "--formula", "E x1 : x1", "--k", "2",
    )
    assert doc["result"]["all_accept"] is True
    assert doc["result"]["draws"] == 16

    doc = run_json(
        capsys, "classical", "exhaustive",
        "--formula", "A x1 : x1", "--k", "2", "--prover", "optimal",
    )
    res = doc["result"]
    assert res["max_acceptance"]["rational"] == "5/8"
    assert res["within_cap"] is True

    doc = run_json(
        capsys, "classical", "exhaustive",
        "--formula", "A x1 : x1", "--k", "2", "--prover", "lookahead:full",
    )
    res = doc["result"]
    assert (res["winnable_rows"], res["total_rows"]) == (15, 16)
    assert res["winnable_fraction"]["rational"] == "15/16"


def test_quantum_run_honest_exact_one(capsys):
    doc = run_json(
        capsys, "quantum", "run", "--formula", "E x1 : x1",
        "--k", "2", "--m", "1",
    )
    res = doc["result"]
    assert res["mean_accept"]["rational"] == "1/1"
    assert all(e["accept"]["rational"] == "1/1" for e in res["per_u"])


def test_quantum_run_lookahead_detected(capsys):
    doc = run_json(
        capsys, "quantum", "run", "--formula", "A x1 : x1",
        "--k", "2", "--m", "1", "--prover", "lookahead:full",
        "--dense-check",
    )
    res = doc["result"]
    assert res["mean_accept"]["rational"] == "325/512"
    assert res["dense_check"]["agrees"] is True
    assert res["dense_check"]["max_abs_diff"] <= 1e-9
    assert res["events"]["resume_union_per_row"] == [
        {"rational": "1/1", "float": 1.0}
    ]


def test_quantum_run_sample_mode_deterministic(capsys):
    argv = [
        "quantum", "run", "--formula", "E x1 : x1", "--k", "2", "--m", "2",
        "--u", "sample", "--samples", "6", "--seed", "3",
    ]
    a = run_json(capsys, *argv)
    b = run_json(capsys, *argv)
    assert a == b
    assert len(a["result"]["per_u"]) == 6


def test_byte_identical_reports(capsys):
    argv = ["classical", "run", "--formula", "E x1 : x1", "--k", "3",
            "--trials", "7", "--seed", "5"]
    _, out1, _ = run_cli(capsys, *argv)
    _, out2, _ = run_cli(capsys, *argv)
    assert out1 == out2


def test_bound_with_xlen(capsys):
    doc = run_json(capsys, "bound", "--xlen", "5", "--d", "3", "--N", "2")
    res = doc["result"]
    assert res["params"] == {"d": 3, "N": 2, "m": 12, "k": 22}
    assert res["satisfied"] is True
    assert res["bound"] == pytest.approx(0.008346688970213427, rel=1e-9)
    assert res["target"] == pytest.approx(2 ** -5, rel=1e-12)


def test_bound_explicit_params_vacuous(capsys):
    doc = run_json(capsys, "bound", "--d", "2", "--n", "1",
                   "--m", "1", "--k", "1")
    res = doc["result"]
    assert res["params"]["N"] == 2
    assert res["vacuous"] is True
    assert res["target"] is None and res["satisfied"] is None


def test_bound_param_errors(capsys):
    code, _, err = run_cli(capsys, "bound", "--d", "3", "--N", "2", "--m", "4")
    assert code == 2 and "qipsim: error:" in err
    code, _, err = run_cli(capsys, "bound", "--d", "3", "--N", "2")
    assert code == 2 and "qipsim: error:" in err


def test_field_table(capsys):
    doc = run_json(capsys, "field", "table", "--k", "2")
    res = doc["result"]
    assert res["modulus"] == 7 and res["modulus_hex"] == "0x7"
    assert res["tables_included"] is True
    assert res["mul_table"][2][2] == 3  # x * x = x + 1
    assert res["add_table"][1][1] == 0
    big = run_json(capsys, "field", "table", "--k", "16")
    assert big["result"]["tables_included"] is False
    assert "mul_table" not in big["result"]


def test_field_table_bad_k(capsys):
    code, _, err = run_cli(capsys, "field", "table", "--k", "0")
    assert code == 2 and "qipsim: error:" in err


def test_syntax_error_path(capsys):
    code, out, err = run_cli(
        capsys, "classical", "run", "--formula", "E x1 : x2", "--k", "2")
    assert code == 2 and out == ""
    assert err.startswith("qipsim: error:")
    assert "line 1" in err


def test_argparse_error_uses_prefix(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classical", "run", "--formula", "E x1 : x1"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "qipsim: error:" in err


def test_csv_formats(capsys):
    code, out, _ = run_cli(
        capsys, "classical", "run", "--formula", "E x1 : x1", "--k", "2",
        "--trials", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["trial", "seed", "accepted", "reject_round"]
    assert len(rows) == 4

    code, out, _ = run_cli(
        capsys, "quantum", "run", "--formula", "A x1 : x1", "--k", "2",
        "--m", "1", "--prover", "lookahead:full", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["index", "u", "step1_pass", "accept", "accept_float"]
    assert rows[1][2] == "15/16" and rows[1][3] == "225/256"

    code, _, err = run_cli(
        capsys, "bound", "--xlen", "1", "--d", "3", "--N", "2",
        "--format", "csv")
    assert code == 2 and "csv output is not supported" in err


def test_formula_file_and_output_file(tmp_path, capsys):
    src = tmp_path / "f.qbf"
    src.write_text("E x1 : x1\n", encoding="utf-8")
    dst = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys, "classical", "exhaustive", "--formula-file", str(src),
        "--k", "2", "-o", str(dst))
    assert code == 0 and out == ""
    doc = json.loads(dst.read_text(encoding="utf-8"))
    assert doc["result"]["all_accept"] is True
    code, _, err = run_cli(
        capsys, "classical", "exhaustive",
        "--formula-file", str(tmp_path / "missing.qbf"), "--k", "2")
    assert code == 2 and "qipsim: error:" in err


def test_timing_goes_to_stderr(capsys):
    code, out, err = run_cli(
        capsys, "field", "table", "--k", "2", "--timing")
    assert code == 0
    assert "timing" not in out
    assert err.startswith("qipsim: timing:")


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("qipsim ")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qipsim", "field", "table", "--k", "3"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["result"]["modulus"] == 11
