import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from eulersphere.cli import EXIT_ACCEPTANCE, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, WORKERS_ENV, load_config, run, schema
from eulersphere.harmonics import SpectralField, laplacian


def envelope(capsys, argv, code=EXIT_OK):
    assert run(argv) == code
    out = capsys.readouterr().out
    env = json.loads(out)
    jsonschema.validate(env, schema())
    return env


def test_construct_envelope(capsys):
    env = envelope(capsys, ["construct", "--beta", "1", "--gamma", "1", "--eps", "0.01", "--nmax", "12"])
    assert env["subcommand"] == "construct" and env["status"] == "ok"
    assert env["payload"]["converged"] is True
    assert env["config"]["nmax"] == 12
    assert env["wall_clock_s"] >= 0


def test_construct_files(tmp_path, capsys):
    out, field, table = tmp_path / "env.json", tmp_path / "psi.json", tmp_path / "psi.csv"
    code = run(["construct", "--beta", "1", "--gamma", "0", "--eps", "0.01", "--nmax", "10",
                "--out", str(out), "--field-out", str(field), "--csv", str(table)])
    assert code == EXIT_OK
    env = json.loads(out.read_text())
    assert env["tables"] == [str(field), str(table)]
    Psi = SpectralField.from_json(field.read_text())
    assert Psi.nmax == 10 and Psi[2, 0] == 1.0
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["n", "m", "coefficient"]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test run\nbeta = 1.0\ngamma = 0.5\neps = 0.02\nnmax = 8  # small\n")
    assert load_config(cfg)["nmax"] == "8"
    env = envelope(capsys, ["construct", "--config", str(cfg), "--nmax", "10"])
    assert env["config"]["nmax"] == 10 and env["config"]["gamma"] == 0.5


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("beta = 1\nfoo = 2\n")
    assert run(["construct", "--config", str(cfg)]) == EXIT_USAGE
    assert "unknown config key" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--beta", "0", "--gamma", "0", "--eps", "0.1"],
        ["construct", "--beta", "1", "--gamma", "0", "--eps", "-0.1"],
        ["construct", "--beta", "1", "--gamma", "0"],
        ["rigidity", "--alpha", "0"],
        ["gaunt", "--triple", "1,2,1,0,1,0"],
        ["norms"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE


def test_compute_error(capsys):
    env = envelope(capsys, ["construct", "--beta", "1", "--gamma", "1", "--eps", "80", "--nmax", "8"], EXIT_COMPUTE)
    assert env["status"] == "error"
    assert env["error"]["type"] == "NoContractionError"


def test_sweep_csv_on_stdout(capsys):
    assert run(["sweep", "--beta", "1", "--gamma", "0", "--eps-list", "0.004,0.002,0.001", "--nmax", "10"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert tuple(rows[0]) == ("eps", "psi_Y62", "psi_Y42", "psi_Y40", "A", "B", "iterations", "residual")
    assert len(rows) == 4


def test_sweep_workers_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "1")
    out = tmp_path / "e.json"
    assert run(["sweep", "--beta", "1", "--gamma", "1", "--eps-list", "0.002,0.001", "--nmax", "8",
                "--workers", "4", "--out", str(out), "-q"]) == EXIT_OK
    env = json.loads(out.read_text())
    assert set(env["payload"]["slopes"]) == {"Y62", "Y42"}
    assert "Y62" in env["payload"]["leading_coefficients"]


def test_evolve_from_file_and_construct(tmp_path, capsys):
    field = tmp_path / "w.json"
    field.write_text(laplacian(SpectralField.mode(3, 2, 8)).to_json())
    state = tmp_path / "final.json"
    assert run(["evolve", "--init", str(field), "--dt", "0.01", "--T", "0.1", "--nmax", "8",
                "--gamma", "0.5", "--state-out", str(state)]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["time", "energy", "enstrophy", "mean", "drift"] and len(rows) == 12
    assert SpectralField.from_json(state.read_text()).nmax == 8
    out = tmp_path / "env.json"
    assert run(["evolve", "--init", "construct:beta=1,gamma=1,eps=0.05,nmax=10", "--gamma", "1",
                "--dt", "0.01", "--T", "0.05", "--nmax", "10", "--out", str(out), "-q"]) == EXIT_OK
    assert json.loads(out.read_text())["payload"]["final_drift"] < 1e-10


def test_evolve_preconditions(tmp_path, capsys):
    field = tmp_path / "w.json"
    field.write_text(SpectralField.mode(0, 0, 4).to_json())
    assert run(["evolve", "--init", str(field), "--dt", "0.01", "--T", "0.1", "--nmax", "4"]) == EXIT_USAGE
    field.write_text((50 * laplacian(SpectralField.mode(3, 2, 16))).to_json())
    assert run(["evolve", "--init", str(field), "--dt", "1", "--T", "1", "--nmax", "16"]) == EXIT_USAGE
    assert "RK4" in capsys.readouterr().err
    assert run(["evolve", "--init", "construct:beta=1", "--dt", "0.1", "--T", "1"]) == EXIT_USAGE


def test_rigidity(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["rigidity", "--alpha", "1", "--exclude-degree1", "--nmax", "10", "--out", str(out), "-q"]) == EXIT_OK
    env = json.loads(out.read_text())
    assert env["payload"]["regime"] == "conditionally-rigid"
    assert env["payload"]["C1"]["C1"] == "inf"
    assert env["payload"]["C1_selected"] == env["payload"]["C1_excluding_degree1"]


def test_gaunt(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(["gaunt", "--triple", "2,0,2,0,2,0", "--identity-n", "1,2", "--out", str(out), "-q"]) == EXIT_OK
    env = json.loads(out.read_text())
    assert env["payload"]["rows"][0][0] == "triple"
    assert set(env["payload"]["identity_ratios"]) == {"1", "2"}


def test_norms(tmp_path, capsys):
    field = tmp_path / "f.json"
    field.write_text(SpectralField.mode(2, 2).to_json())
    out = tmp_path / "n.json"
    assert run(["norms", "--field", str(field), "--bound", "1e6", "--out", str(out), "-q"]) == EXIT_OK
    env = json.loads(out.read_text())
    assert ["H", 2.0, 7.0] in env["payload"]["rows"]
    assert env["payload"]["lambda_max"] > 0
    assert run(["norms", "--field", str(field), "--lam-grid", "-1"]) == EXIT_USAGE


def test_verify_quick(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert run(["verify", "--quick", "--out", str(out)]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    env = json.loads(out.read_text())
    assert env["payload"]["passed"] == env["payload"]["total"]


def test_verify_failure_exit_code(tmp_path, capsys):
    out = tmp_path / "v.json"
    # criterion 6 fails at its stated N (residual already at roundoff)
    assert run(["verify", "--only", "6", "--out", str(out), "-q"]) == EXIT_ACCEPTANCE
    assert json.loads(out.read_text())["status"] == "acceptance-failure"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eulersphere", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "eulersphere" in proc.stdout

