import io
import json
import subprocess
import sys

import numpy as np
import pytest

from spincorr import cli
from spincorr.sweep import read_csv


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_eval_json():
    code, out, _ = run("eval", "xxz", "J=1", "Jz=0.4", "B=0", "b=0.8", "T=0.4")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"model", "parameters", "logZ", "S_rho", "S_a", "S_b", "I_rho",
                        "I_measured", "Q", "C"}
    assert doc["model"] == "xxz"
    assert doc["parameters"] == {"J": 1.0, "Jz": 0.4, "B": 0.0, "b": 0.8, "T": 0.4}
    assert 0 <= doc["C"] <= 1 and doc["Q"] >= 0


def test_eval_usage_errors():
    assert run("eval", "dm", "J=1", "T=1")[0] == 2
    assert run("eval", "dm", "J=1", "D=0")[0] == 2
    assert run("eval", "dm", "J=1", "D=0", "T=0")[0] == 2
    assert run("eval", "dm", "J=1", "D=abc", "T=1")[0] == 2
    assert run("eval", "ising", "J=1")[0] == 2
    assert run()[0] == 2


def test_sweep_csv_stdout():
    code, out, _ = run("sweep", "--model", "xxz", "--axis", "b=-0.2:0.2:0.1",
                       "--fix", "J=1", "--fix", "Jz=0", "--fix", "B=0", "--fix", "T=0.4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "b,Q,C,logZ" and len(lines) == 6
    assert lines[1].split(",")[1:] == lines[5].split(",")[1:]


def test_sweep_invalid_grid():
    code, _, err = run("sweep", "--model", "xxz", "--axis", "b=1:0:0.1",
                       "--fix", "J=1", "--fix", "Jz=0", "--fix", "B=0", "--fix", "T=0.4")
    assert code == 2 and "step" in err


def test_numerical_failure_exit_code(monkeypatch):
    from spincorr import sweep
    from spincorr.errors import NumericalFailure

    def boom(model, params):
        raise NumericalFailure("no convergence", index=0)

    monkeypatch.setattr(sweep, "_evaluate_chunk", boom)
    code, _, err = run("sweep", "--model", "dm", "--axis", "J=0:1:0.5", "--fix", "D=0",
                       "--fix", "T=1")
    assert code == 3 and "J" in err


def test_figure_writes_one_file_per_panel(tmp_path):
    code, out, _ = run("figure", "fig3", "--out", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["fig3_b0.8.csv", "fig3_b0.csv"]
    header, values = read_csv(tmp_path / "fig3_b0.csv")
    assert header == ["B", "T", "Q", "C", "logZ"] and len(values) == 31 * 20


def test_figure_axis_override_and_density(tmp_path):
    code, _, _ = run("--out", str(tmp_path), "figure", "fig5", "--axis", "x=0:2:0.5",
                     "--grid-density", "2")
    assert code == 0
    header, values = read_csv(tmp_path / "fig5.csv")
    assert header == ["x", "Q", "C"]
    assert np.array_equal(values[:, 0], np.arange(0, 2.01, 0.25))
    assert run("figure", "fig5", "--axis", "T=0:1:0.1", "--out", str(tmp_path))[0] == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# fig5 over a short range\naxis = x=1:2:0.5\nout = %s\n" % tmp_path)
    code, _, _ = run("figure", "fig5", "--config", str(cfg))
    assert code == 0
    _, values = read_csv(tmp_path / "fig5.csv")
    assert np.array_equal(values[:, 0], [1, 1.5, 2])
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run("verify", "--config", str(bad))[0] == 2
    assert run("verify", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_verify_report_and_determinism():
    code, one, _ = run("verify", "--seed", "42", "--threads", "1", "--samples", "2000")
    assert code == 0
    code8, eight, _ = run("--seed", "42", "verify", "--threads", "8", "--samples", "2000")
    assert code8 == 0 and one == eight
    labels = [line.split()[0] for line in one.splitlines()[1:5]]
    assert labels == ["XXZ-Q", "XXZ-C", "DM-Q", "DM-C"]
    assert one.splitlines()[-1] == "result: PASS"


def test_verify_grid_density_two():
    code, out, _ = run("verify", "--grid-density", "2", "--samples", "0")
    assert code == 0
    # 10 points per axis over five XXZ parameters and three DM parameters
    assert "points=100000" in out and "points=1000 " in out


def test_verify_failure_exit_code(monkeypatch):
    from spincorr import verification
    monkeypatch.setattr(verification, "TOLERANCE", -1.0)
    code, out, _ = run("verify", "--samples", "10")
    assert code == 1
    assert "FAIL" in out and "worst at J=" in out


def test_bad_flag_values():
    assert run("verify", "--threads", "0")[0] == 2
    assert run("verify", "--grid-density", "0")[0] == 2
    assert run("verify", "--threads", "two")[0] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "spincorr", "eval", "dm", "J=1", "D=0",
                           "T=1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["model"] == "dm"
