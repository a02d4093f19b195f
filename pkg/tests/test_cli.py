"""Command-line interface tests over small configurations."""

import json

import numpy as np
import pytest

from qrcforecast.chaos import TimeSeries
from qrcforecast.cli import main


def run_cli(*args):
    return main([str(a) for a in args])


@pytest.fixture()
def tiny_config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "system": "lorenz63", "cycles": 2, "n_reservoirs": 1, "poly_degree": 1,
        "beta": 1e-8, "a": 0.2, "b": 0.8,
        "n_sync": 10, "n_train": 60, "n_pred": 20, "n_stat": 2, "seed": 3,
    }))
    return path


def test_generate_writes_csv(tmp_path):
    out = tmp_path / "traj.csv"
    assert run_cli("generate", "--system", "roessler", "--steps", 120, "--discard", 10, "--out", out) == 0
    series = TimeSeries.from_csv(out)
    assert len(series) == 120
    assert series.dt == pytest.approx(0.1)


def test_train_predict_evaluate_chain(tmp_path, tiny_config_file):
    model_path = tmp_path / "model.json"
    assert run_cli("train", "--config", tiny_config_file, "--out", model_path) == 0
    payload = json.loads(model_path.read_text())
    assert payload["config"]["system"] == "lorenz63"
    assert len(payload["w_out"]) == 3

    pred_path = tmp_path / "pred.csv"
    truth_path = tmp_path / "truth.csv"
    assert run_cli(
        "predict", "--model", model_path, "--steps", 20,
        "--out", pred_path, "--truth-out", truth_path,
    ) == 0
    assert len(TimeSeries.from_csv(pred_path)) == 20

    metrics_path = tmp_path / "metrics.json"
    assert run_cli(
        "evaluate", "--pred", pred_path, "--truth", truth_path,
        "--system", "lorenz63", "--out", metrics_path,
    ) == 0
    result = json.loads(metrics_path.read_text())
    assert result["forecast_horizon_lyap"] >= 0.0
    # series much shorter than the estimator windows: climate metrics absent
    assert result["lambda_max"] is None
    assert result["corr_dim"] is None


def test_run_writes_reports_and_figures(tmp_path, tiny_config_file):
    out = tmp_path / "run"
    assert run_cli("run", "--config", tiny_config_file, "--out", out) == 0
    assert (out / "manifest.json").exists()
    assert (out / "reports.csv").exists()
    assert (out / "summary.json").exists()
    assert (out / "horizon_box.svg").stat().st_size > 0
    assert (out / "climate_scatter.svg").stat().st_size > 0
    rows = (out / "reports.csv").read_text().splitlines()
    assert len(rows) == 3  # header + 2 realizations


def test_flag_overrides_config_file(tmp_path, tiny_config_file):
    out = tmp_path / "run"
    assert run_cli(
        "run", "--config", tiny_config_file, "--n-stat", 1, "--seed", 9,
        "--no-figures", "--out", out,
    ) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["n_stat"] == 1
    assert manifest["config"]["seed"] == 9
    assert not (out / "horizon_box.svg").exists()


def test_sweep_cli(tmp_path, tiny_config_file):
    out = tmp_path / "sweep"
    assert run_cli(
        "sweep", "--config", tiny_config_file, "--budget", 2, "--trial-stat", 1, "--out", out,
    ) == 0
    lines = (out / "trials.csv").read_text().splitlines()
    assert len(lines) == 3


def test_noise_sweep_cli(tmp_path, tiny_config_file):
    out = tmp_path / "noise"
    assert run_cli(
        "noise-sweep", "--config", tiny_config_file, "--gammas", "0,1e-3",
        "--substeps", 200, "--out", out, "--no-figures",
    ) == 0
    lines = (out / "noise.csv").read_text().splitlines()
    assert len(lines) == 3


def test_report_cli(tmp_path, tiny_config_file):
    run_dir = tmp_path / "run"
    run_cli("run", "--config", tiny_config_file, "--no-figures", "--out", run_dir)
    out = tmp_path / "figs"
    assert run_cli("report", "--reports", run_dir / "reports.csv", "--out", out) == 0
    assert (out / "horizon_box.svg").stat().st_size > 0
    assert (out / "climate_scatter.svg").stat().st_size > 0


def test_model_replay_is_deterministic(tmp_path, tiny_config_file):
    model_path = tmp_path / "model.json"
    run_cli("train", "--config", tiny_config_file, "--out", model_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli("predict", "--model", model_path, "--steps", 15, "--out", a)
    run_cli("predict", "--model", model_path, "--steps", 15, "--out", b)
    assert a.read_bytes() == b.read_bytes()
    first = TimeSeries.from_csv(a)
    assert np.all(np.isfinite(first.points))
