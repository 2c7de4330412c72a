import csv
import io
import json
import subprocess
import sys

import pytest

from fracosc.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_table_initial_row(capsys):
    code, out, _ = run(["table", "--alpha", "1", "--t-max", "10", "--n-points", "200"], capsys)
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "t,e_alpha,i_alpha"
    assert lines[1] == "0,1,0"
    assert len(lines) == 202 and lines[-1] == ""
    assert "\r" not in out


def test_table_json_is_finite(capsys):
    code, out, _ = run(["table", "--alpha", "1.5", "--t-max", "5", "--n-points", "11",
                        "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["rows"]) == 11 and doc["columns"] == ["t", "e_alpha", "i_alpha"]


def test_decompose_identity(capsys):
    code, out, _ = run(["decompose", "--alpha", "1.8", "--t-max", "25"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["kind"] for r in rows} == {"e", "i"}
    assert list(rows[0]) == ["kind", "t", "total", "branch_cut", "residue"]
    for r in rows:
        assert float(r["t"]) > 0
        assert abs(float(r["total"]) - float(r["branch_cut"]) - float(r["residue"])) <= 1e-9


def test_seventeen_significant_digits(capsys):
    _, out, _ = run(["table", "--alpha", "1.5", "--t-min", "1", "--t-max", "2", "--n-points", "2"], capsys)
    e = out.split("\n")[1].split(",")[1]
    assert len(e.lstrip("-0.").replace(".", "")) >= 16


def test_verify_passes(capsys):
    code, out, _ = run(["verify", "--alpha", "1.5", "--n", "1024"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    names = {c["name"] for c in doc["checks"]}
    assert {"eq2", "eq3_e", "eq4", "D_e=-i", "D_i=e", "J_e=i", "J_i=1-e"} <= names
    for c in doc["checks"]:
        assert c["sup_norm_refined"] < c["sup_norm"]


def test_verify_fails_on_impossible_band(capsys):
    code, out, _ = run(["verify", "--alpha", "1.5", "--n", "256", "--band", "0.0"], capsys)
    assert code == 1 and json.loads(out)["passed"] is False


def test_zeros_json(capsys):
    code, out, _ = run(["zeros", "--alpha", "1.8"], capsys)
    doc = json.loads(out)
    assert code == 0
    e = [r for r in doc["reports"] if r["kind"] == "e"][0]
    assert e["count"] % 2 == 1 and e["certificate"]["holds"]


def test_mc_output(capsys):
    code, out, _ = run(["mc", "--alpha", "1.5", "--t-max", "2", "--n-points", "3",
                        "--n-paths", "500", "--seed", "4"], capsys)
    assert code == 0
    assert out.split("\n")[0] == "t,a_hat,b_hat,std_err_a,std_err_b"
    assert out.split("\n")[1] == "0,1,0,0,0"


def test_argument_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["table"])
    assert exc.value.code == 2
    code, _, err = run(["table", "--alpha", "3"], capsys)
    assert code == 2 and "usage" in err
    code, _, _ = run(["table", "--alpha", "1.5", "--t-min", "5", "--t-max", "1"], capsys)
    assert code == 2
    code, _, _ = run(["decompose", "--alpha", "2"], capsys)
    assert code == 2


def test_out_of_range_parameters_exit_2(capsys):
    code, _, _ = run(["zeros", "--alpha", "1.8", "--refine-tol", "0"], capsys)
    assert code == 2
    code, _, _ = run(["mc", "--alpha", "2", "--n-paths", "100"], capsys)
    assert code == 2


def test_numerical_failure_exit_1(capsys, monkeypatch):
    from fracosc import zeros
    from fracosc.errors import RefinementError

    def stalled(*args, **kwargs):
        raise RefinementError("bisection stalled at t=3.25")

    monkeypatch.setattr(zeros, "find_zeros", stalled)
    code, out, err = run(["zeros", "--alpha", "1.8"], capsys)
    assert code == 1 and out == ""
    assert "bisection stalled at t=3.25" in err


def test_output_file_is_written_atomically(tmp_path, capsys):
    target = tmp_path / "d.csv"
    code, _, _ = run(["decompose", "--alpha", "1.5", "--t-max", "5", "--n-points", "20",
                      "--output", str(target)], capsys)
    assert code == 0
    assert target.read_text().startswith("kind,t,total")
    assert [p.name for p in tmp_path.iterdir()] == ["d.csv"]


def test_identical_invocations_are_byte_identical(tmp_path):
    cmd = [sys.executable, "-m", "fracosc", "mc", "--alpha", "1.6", "--n-paths", "2000",
           "--seed", "12", "--n-points", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and len(a) > 0
