import json

import numpy as np
import pytest

from genaimarket.cli import EXIT_INVALID, EXIT_OK, main
from genaimarket.twolevel import TwoLevelConfig, twolevel_densities


@pytest.fixture
def density_files(tmp_path):
    cfg = TwoLevelConfig(g_low=0.2)
    p, g = twolevel_densities(cfg, 200)
    p_file = tmp_path / "p.csv"
    g_file = tmp_path / "g.csv"
    p.to_csv(p_file)
    g.to_csv(g_file)
    return str(p_file), str(g_file)


def _mfe_args(p_file, g_file, *extra):
    return ["--p-file", p_file, "--g-file", g_file,
            "--gamma", "0.85", "--cost", "0.15", *extra]


def test_pregenai_stdout(capsys):
    rc = main(["pregenai", "--gamma", "0.9", "--cost", "0.5", "--alpha", "0.5"])
    assert rc == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["W_star"] == pytest.approx(0.4, abs=1e-9)
    assert report["Pi_star"] == pytest.approx(0.5, abs=1e-9)
    assert report["beta_H"] == pytest.approx(1.0, abs=1e-9)


def test_pregenai_rejects_negative_W(capsys):
    rc = main(["pregenai", "--gamma", "0.9", "--cost", "0.5", "--W", "-0.1"])
    assert rc == EXIT_INVALID


def test_solve_writes_solution(tmp_path, density_files, capsys):
    p_file, g_file = density_files
    out = tmp_path / "run"
    rc = main(["solve", *_mfe_args(p_file, g_file), "--v-bar", "0.16", "--out", str(out)])
    assert rc == EXIT_OK
    payload = json.loads((out / "solution.json").read_text())
    assert payload["classification"] == "Interior"
    assert payload["quantities"]["V_tilde"] == pytest.approx(0.158334187, abs=1e-6)


def test_solve_then_verify_roundtrip(tmp_path, density_files, capsys):
    p_file, g_file = density_files
    out = tmp_path / "run"
    assert main(["solve", *_mfe_args(p_file, g_file), "--v-bar", "0.16", "--out", str(out)]) == EXIT_OK
    rc = main([
        "verify", *_mfe_args(p_file, g_file),
        "--solution", str(out / "solution.json"), "--out", str(out),
    ])
    assert rc == EXIT_OK
    rep = json.loads((out / "verify.json").read_text())
    assert rep["consistency_residual"] <= 1e-8
    assert rep["incentive_residual"] <= 1e-8


def test_classify_reducible(density_files, capsys):
    p_file, g_file = density_files
    rc = main(["classify", *_mfe_args(p_file, g_file), "--v-bar", "0.16", "--w", "0.05"])
    assert rc == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["classification"] == "Reducible"
    assert out["reduced_scheme"]["v_bar"] > 0.16


def test_curve_monotone_revenue(tmp_path, density_files):
    p_file, g_file = density_files
    out = tmp_path / "run"
    rc = main(["curve", *_mfe_args(p_file, g_file), "--n-points", "40", "--out", str(out)])
    assert rc == EXIT_OK
    lines = (out / "curve.csv").read_text().strip().split("\n")
    assert lines[0] == "v_bar,w,R,Pi,classification"
    rows = [line.split(",") for line in lines[1:]]
    R = np.array([float(r[2]) for r in rows])
    assert np.all(np.diff(R) <= 1e-10)
    assert all(r[4] == "Interior" for r in rows)


def test_optimize_output(density_files, capsys):
    p_file, g_file = density_files
    rc = main(["optimize", *_mfe_args(p_file, g_file)])
    assert rc == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["w_star"] == pytest.approx(0.09, abs=0.02)
    assert out["Pi_star"] == pytest.approx(0.8025, abs=0.002)
    assert not out["no_compensation"]


def test_twolevel_reports_regime(capsys):
    rc = main(["twolevel", "--g-low", "0.2", "--v-bar", "0.16"])
    assert rc == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["g_star"] == pytest.approx(0.2718, abs=1e-3)
    assert out["v0"] == pytest.approx(0.28119, abs=1e-4)
    assert out["at_v_bar"]["Pi"] == pytest.approx(0.783249, abs=1e-5)

    rc = main(["twolevel", "--g-low", "0.4"])
    assert rc == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert "w_min" in out
    assert out["w_min"] == pytest.approx(0.068915, abs=1e-5)


def test_config_file_with_flag_override(tmp_path, density_files, capsys):
    p_file, g_file = density_files
    cfg = {"p-file": p_file, "g-file": g_file, "gamma": 0.85, "cost": 0.15,
           "v-bar": 0.20}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    rc = main(["solve", "--config", str(cfg_path), "--v-bar", "0.16"])
    assert rc == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["scheme"]["v_bar"] == pytest.approx(0.16)


def test_invalid_inputs_exit_2(tmp_path, density_files, capsys):
    p_file, g_file = density_files
    assert main(["solve", "--p-file", p_file, "--g-file", g_file,
                 "--gamma", "0.85", "--cost", "-1", "--v-bar", "0.16"]) == EXIT_INVALID
    assert main(["solve", *_mfe_args(p_file, g_file)]) == EXIT_INVALID  # missing v-bar
    assert main(["solve", *_mfe_args(p_file, "/nonexistent.csv"), "--v-bar", "0.16"]) == EXIT_INVALID
    # v-bar outside the admissible window
    assert main(["solve", *_mfe_args(p_file, g_file), "--v-bar", "0.40"]) == EXIT_INVALID


def test_simulate_deterministic_csv(tmp_path, capsys):
    args = ["simulate", "--gamma", "0.85", "--cost", "0.15",
            "--v-bar", "0.105", "--w", "0.15", "--n-agents", "800",
            "--n-bins", "50", "--seed", "3", "--max-rounds", "40",
            "--bandwidth", "1.0"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    rc1 = main([*args, "--out", str(out1)])
    rc2 = main([*args, "--out", str(out2)])
    assert rc1 == rc2
    assert (out1 / "period.csv").read_bytes() == (out2 / "period.csv").read_bytes()
    report = json.loads((out1 / "simulate.json").read_text())
    assert report["R"] >= report["Pi"]
    sidecar = json.loads((out1 / "run_config.json").read_text())
    assert sidecar["seed"] == 3
    assert sidecar["command"] == "simulate"


def test_multiperiod_outputs(tmp_path):
    out = tmp_path / "mp"
    rc = main(["multiperiod", "--gamma", "0.85", "--cost", "0.15",
               "--v-bar", "0.105", "--w", "0.15", "--n-agents", "600",
               "--n-bins", "50", "--seed", "0", "--periods", "3",
               "--bandwidth", "0.8", "--shrink", "0.5", "--max-rounds", "40",
               "--out", str(out)])
    assert rc in (0, 3)
    lines = (out / "periods.csv").read_text().strip().split("\n")
    assert len(lines) == 4
    report = json.loads((out / "multiperiod.json").read_text())
    assert report["total_R"] >= report["total_Pi"]
    for t in (1, 2, 3):
        hist = (out / f"hist_t{t:02d}.csv").read_text().strip().split("\n")
        assert hist[0] == "x,count"
        assert sum(int(line.split(",")[1]) for line in hist[1:]) == 600
