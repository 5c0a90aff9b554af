import json
import os
import subprocess
import sys
import time

import pytest

from ethf import random_fock
from ethf.cli import main, read_config
from ethf.model import ModelParams
from ethf.thermal import avg_occupation, avg_occupation_low_t

SMOKE = """\
# eth-correlators smoke run
mode = eth-correlators
n = 32
np = 8
realizations = 10
seed = 20240601
"""


def _ethf(*args, env=None):
    full_env = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "ethf.cli", *args], capture_output=True, text=True, env=full_env)


def test_config_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(SMOKE + "sizes = 2, 4\nexclude-flagged = false\n")
    cfg = read_config(path)
    assert cfg["n"] == 32 and cfg["seed"] == 20240601 and cfg["sizes"] == "2, 4"
    path.write_text("colour = blue\n")
    with pytest.raises(ValueError, match="unknown key"):
        read_config(path)


def test_missing_seed_names_the_field(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text(SMOKE.replace("seed = 20240601\n", ""))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 1
    assert "seed" in capsys.readouterr().err


def test_bad_values_exit_one(tmp_path, capsys):
    assert main(["run", "--mode", "spectrum-stats", "--n", "8", "--np", "12", "--seed", "1",
                 "--out", str(tmp_path)]) == 1
    assert main(["run", "--mode", "spectrum-stats", "--n", "16", "--alpha", "2", "--np", "2", "--seed", "1",
                 "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert err.count("error:") == 2


def test_numerical_failure_exit_two(tmp_path, monkeypatch):
    from ethf import cli
    from ethf.goe import EigensolverError

    def boom(cfg):
        raise EigensolverError("did not converge")

    monkeypatch.setattr(cli, "run_experiment", boom)
    assert main(["run", "--mode", "spectrum-stats", "--n", "8", "--np", "2", "--seed", "1",
                 "--out", str(tmp_path)]) == 2


def test_smoke_run_is_fast_and_complete(tmp_path):
    cfg = tmp_path / "smoke.cfg"
    cfg.write_text(SMOKE)
    out = tmp_path / "out"
    t0 = time.perf_counter()
    proc = _ethf("run", "--config", str(cfg), "--out", str(out))
    elapsed = time.perf_counter() - t0
    assert proc.returncode == 0, proc.stderr
    assert elapsed < 5.0
    names = {p.name for p in out.iterdir()}
    assert {"report.json", "psi_offdiag_var.csv", "beta_diag_mean.csv", "diag_mean_gap.csv"} <= names
    header = proc.stdout.splitlines()[1].split()
    assert header[:4] == ["quantity", "measured", "predicted", "z"]


def test_rerun_is_byte_identical(tmp_path):
    cfg = tmp_path / "smoke.cfg"
    cfg.write_text(SMOKE)
    outs = []
    for k, workers in enumerate(("1", "2")):
        out = tmp_path / f"out{k}"
        assert main(["run", "--config", str(cfg), "--out", str(out), "--workers", workers]) == 0
        outs.append(out)
    csvs = sorted(p.name for p in outs[0].glob("*.csv"))
    assert csvs
    for name in csvs:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    recs = [json.loads((o / "report.json").read_text())["records"] for o in outs]
    assert recs[0] == recs[1]


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "smoke.cfg"
    cfg.write_text(SMOKE)
    out = tmp_path / "o"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--realizations", "3"]) == 0
    meta = json.loads((out / "report.json").read_text())["meta"]
    assert meta["realizations_requested"] == 3


def test_workers_env_default(tmp_path):
    out = tmp_path / "o"
    proc = _ethf("run", "--mode", "spectrum-stats", "--n", "8", "--np", "2", "--seed", "4",
                 "--realizations", "4", "--out", str(out), env={"ETHF_WORKERS": "2"})
    assert proc.returncode == 0, proc.stderr
    assert json.loads((out / "report.json").read_text())["meta"]["config"]["workers"] == 2


def test_summary_numbers_in_json_with_full_precision(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--mode", "spectrum-stats", "--n", "16", "--np", "4", "--seed", "9",
                 "--realizations", "20", "--out", str(out)]) == 0
    capsys.readouterr()
    for rec in json.loads((out / "report.json").read_text())["records"]:
        m = rec["measured"]
        assert float(repr(m)) == m  # round-trips at full double precision


def _predict(capsys, *args):
    code = main(["predict", *args])
    out = capsys.readouterr().out
    return code, dict(line.split(None, 1) for line in out.splitlines())


def test_predict_half_filling(capsys):
    code, vals = _predict(capsys, "--n", "16", "--filling", "0.5")
    assert code == 0
    assert float(vals["beta"]) == 0.0
    assert float(vals["n_mean_quadrature"]) == 0.5


def test_predict_reports_quadrature_and_bessel(capsys):
    code, vals = _predict(capsys, "--n", "16", "--alpha", "20", "--eta", "1", "--beta", "3")
    assert code == 0
    p = ModelParams(16, 20.0, 1.0)
    q, b = avg_occupation(p, 3.0).n_mean, avg_occupation_low_t(p, 3.0).n_mean
    assert float(vals["n_mean_quadrature"]) == pytest.approx(q, rel=1e-11)
    assert float(vals["n_mean_bessel"]) == pytest.approx(b, rel=1e-11)
    assert float(vals["n_mean_bessel_minus_quadrature"]) == pytest.approx(b - q, rel=1e-9)
    assert abs(b - q) / q < 1e-3


def test_predict_entropy_list(capsys):
    code, vals = _predict(capsys, "--n", "64", "--np", "16", "--sizes", "4,8")
    assert code == 0
    assert "entropy_entmany[m=4]" in vals and "entropy_entmany[m=8]" in vals


def test_predict_domain_errors(capsys):
    assert main(["predict", "--n", "16", "--np", "1", "--sizes", "20"]) == 1
    assert main(["predict", "--n", "16", "--np", "1", "--sizes", "12"]) == 1
    assert main(["predict", "--n", "16", "--filling", "0.7"]) == 1
    assert main(["predict", "--n", "16"]) == 1
    capsys.readouterr()


def test_validate_fast_passes_quickly():
    t0 = time.perf_counter()
    proc = _ethf("validate", "--level", "fast")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert time.perf_counter() - t0 < 30
    assert "[FAIL]" not in proc.stdout


def test_validate_full_deltas(capsys):
    assert main(["validate", "--level", "full"]) == 0
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if "peschel_vs_exact_rdm" in l)
    assert "N in [4, 6, 8, 10]" in line
    assert float(line.split(":")[1].split()[0]) < 1e-8


def test_tampered_sign_convention_fails_validation(monkeypatch, capsys):
    monkeypatch.setattr(random_fock, "JW_SIGN", 1)
    assert main(["validate", "--level", "fast"]) == 3
    out = capsys.readouterr().out
    assert "[FAIL] peschel_vs_exact_rdm" in out


def test_pure_python_backend_selected_by_env(tmp_path):
    proc = subprocess.run([sys.executable, "-c", "from ethf import kernels; print(kernels.BACKEND)"],
                          capture_output=True, text=True, env=dict(os.environ, ETHF_PURE_PYTHON="1"))
    assert proc.stdout.strip() == "python"
