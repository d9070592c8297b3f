import csv
import io
import json
import subprocess
import sys

import pytest

from transtorsion.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_special_case(capsys):
    code, out, _ = run(capsys, "analyze", "--special-case", "--delta", "1", "--lambda", "0.5", "--nu", "1", "-n", "2")
    assert code == 0
    d = json.loads(out)
    assert d["A"] == -8.25 and d["B"] == 19 and d["classification"] == "HyperbolicReal"


def test_analyze_identity(capsys):
    code, out, _ = run(capsys, "analyze", "--pi", "identity", "--lambda", "0.5", "--nu", "1", "-n", "5")
    assert code == 0 and json.loads(out)["classification"] == "NonHyperbolicParabolic"


def test_analyze_guard_and_precision(capsys):
    code, _, err = run(capsys, "analyze", "--pi", "identity", "-n", "60")
    assert code == 3 and "--precision extended" in err
    code, out, _ = run(capsys, "--precision", "extended", "analyze", "--special-case", "--delta", "1", "-n", "60")
    assert code == 0 and json.loads(out)["classification"] == "HyperbolicReal"


def test_analyze_pi_file(capsys, tmp_path):
    f = tmp_path / "pi.txt"
    f.write_text("1 0 0 0\n0 1 0 0\n2 0 1 0\n0 0 0 1\n")
    code, out, _ = run(capsys, "analyze", "--pi", str(f), "-n", "3")
    assert code == 0 and json.loads(out)["classification"] == "HyperbolicReal"
    f.write_text("2 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1")
    assert run(capsys, "analyze", "--pi", str(f), "-n", "3")[0] == 64
    assert run(capsys, "analyze", "--pi", str(f), "--allow-nonsymplectic", "-n", "3")[0] == 0
    assert run(capsys, "analyze", "--pi", str(tmp_path / "missing.txt"), "-n", "3")[0] == 74


@pytest.mark.parametrize(
    "argv",
    [["analyze", "-n", "0"], ["analyze", "-n", "x"], ["bogus"], ["analyze", "--lambda", "1.5", "-n", "2"],
     ["--tol-hyp", "0", "analyze", "-n", "2"], ["sweep", "--n-range", "5"]],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 64


def test_sweep_shear_family_cells(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "--output", str(out), "--jobs", "1", "sweep", "--special-case", "--delta-values", "0,1",
                     "--nu-values", "0,1", "--lambda-values", "0.5", "--n-range", "1:20")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 80
    reached = {(r["Delta"], r["nu"]) for r in rows if r["classification"] == "HyperbolicReal"}
    assert reached == {("1.0", "1.0")}


def test_sweep_deterministic_across_jobs(capsys, tmp_path):
    outs = []
    for jobs in ("1", "3"):
        out = tmp_path / f"s{jobs}.csv"
        assert run(capsys, "--output", str(out), "--jobs", jobs, "--seed", "7", "sweep", "--ensemble", "10",
                   "--nu-values=-1,1", "--n-range", "1:30:7")[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_sweep_empty_and_io_error(capsys, tmp_path):
    out = tmp_path / "empty.csv"
    assert run(capsys, "--output", str(out), "sweep", "--special-case", "--delta-values", "1", "--n-range", "100:120")[0] == 0
    assert out.read_text().count("\n") == 1
    bad = tmp_path / "no" / "such" / "dir.csv"
    assert run(capsys, "--output", str(bad), "sweep", "--special-case", "--delta-values", "1", "--n-range", "1:3")[0] == 74
    assert not bad.exists()


def test_asymptotics_command(capsys):
    code, out, _ = run(capsys, "asymptotics", "--special-case", "--delta", "1", "--n-range", "5:30:5")
    assert code == 0
    rows = list(csv.DictReader(line for line in io.StringIO(out) if not line.startswith("#")))
    assert all(abs(float(r["ratio2"]) - 1) <= 1e-12 for r in rows)
    assert out.splitlines()[-1].startswith("# ratio2")
    assert run(capsys, "asymptotics", "--pi", "identity", "--n-list", "5")[0] == 5
    code, _, err = run(capsys, "asymptotics", "--special-case", "--delta", "0", "--n-list", "5")
    assert code == 5 and "strongly transverse" in err
    assert run(capsys, "asymptotics", "--special-case", "--delta", "1", "--nu", "-1", "--n-list", "2")[0] == 6


def test_simulate(capsys, tmp_path):
    code, out, _ = run(capsys, "simulate", "--special-case", "--delta", "1", "-k", "0")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and lines[0]["length"] == 0 and "summary" in lines[-1]
    code, out, _ = run(capsys, "simulate", "--special-case", "--delta", "1", "-k", "3", "--start", "0,0,0,0")
    assert code == 0 and json.loads(out.splitlines()[0])["length"] == 0
    orbit = tmp_path / "orbit.csv"
    code, out, _ = run(capsys, "simulate", "--special-case", "--delta", "1", "-k", "3", "--seeds", "0",
                       "--orbit-csv", str(orbit))
    first = json.loads(out.splitlines()[0])
    assert code == 0 and first["length"] >= 1 and set(first["returns"]) == {5}
    assert orbit.read_text().startswith("step,phi,s,rho,u,n\n")


def test_simulate_rational_omega_warns(capsys):
    code, _, err = run(capsys, "simulate", "--special-case", "--delta", "1", "--omega", "0", "-k", "0")
    assert code == 0 and "warning: omega / 2pi is close to 0" in err


def test_verify(capsys):
    code, out, _ = run(capsys, "--jobs", "1", "verify", "--suite", "coefficients")
    assert code == 0 and "coefficients" in out and out.count("PASS") == 1
    code, out, _ = run(capsys, "--jobs", "1", "--tol-spec", "0", "verify", "--suite", "config", "--suite", "symplectic")
    assert code == 1 and "FAIL" in out
    assert run(capsys, "verify", "--suite", "nope")[0] == 64
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0 and len(out.split()) >= 6


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"precision_mode": "extended", "seed": 3}))
    code, out, _ = run(capsys, "--config", str(cfg), "analyze", "--special-case", "--delta", "1", "-n", "60")
    assert code == 0
    assert run(capsys, "--config", str(cfg), "--precision", "standard", "analyze", "--special-case", "--delta", "1", "-n", "60")[0] == 3
    cfg.write_text("{not json")
    assert run(capsys, "--config", str(cfg), "analyze", "-n", "2")[0] == 64


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "transtorsion", "analyze", "--pi", "identity", "-n", "60"],
                          capture_output=True, text=True)
    assert proc.returncode == 3 and proc.stdout == ""
