"""Scoring metric tests against analytic and synthetic oracles."""

import numpy as np
import pytest

from qrcforecast.chaos import TimeSeries, flow_preset, generate_dataset
from qrcforecast.metrics import (
    correlation_dimension,
    dominant_period_steps,
    forecast_horizon,
    rosenstein_lyapunov,
)
from qrcforecast.presets import metric_preset


def make_series(points, dt=0.02, kind="raw"):
    return TimeSeries(np.asarray(points, dtype=float), dt, kind)


class TestForecastHorizon:
    def test_perfect_prediction_spans_everything(self):
        rng = np.random.default_rng(0)
        truth = make_series(rng.normal(size=(500, 3)))
        t_v = forecast_horizon(truth, truth, e_max=0.4, lambda_ref=0.91)
        assert t_v == pytest.approx(0.02 * 500 * 0.91)

    def test_immediately_bad_prediction_scores_zero(self):
        truth = make_series(np.ones((100, 3)))
        pred = make_series(np.ones((100, 3)) * 50.0)
        assert forecast_horizon(pred, truth, 0.4, 0.91) == 0.0

    def test_conversion_arithmetic(self):
        # error crosses the threshold after exactly 654 accurate steps:
        # t_v = 0.02 * 654 * 0.91 = 11.9028 Lyapunov times
        n = 1000
        truth = make_series(np.tile([3.0, 4.0, 0.0], (n, 1)))
        pred = truth.points.copy()
        pred[654:] += 100.0
        t_v = forecast_horizon(make_series(pred), truth, 0.4, 0.91)
        assert t_v == pytest.approx(11.9028)
        assert round(t_v, 1) == 11.9

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(1)
        truth = make_series(np.cumsum(rng.normal(size=(400, 3)), axis=0) + 5.0)
        pred = make_series(truth.points + np.linspace(0, 5, 400)[:, None])
        horizons = [forecast_horizon(pred, truth, e, 1.0) for e in (0.05, 0.1, 0.2, 0.4)]
        assert all(h1 <= h2 + 1e-12 for h1, h2 in zip(horizons, horizons[1:]))

    def test_invariant_under_common_rescaling(self):
        rng = np.random.default_rng(2)
        truth = make_series(rng.normal(size=(300, 3)) + 2.0)
        pred = make_series(truth.points + rng.normal(scale=0.3, size=(300, 3)))
        base = forecast_horizon(pred, truth, 0.4, 0.91)
        scaled = forecast_horizon(
            make_series(pred.points * 7.5), make_series(truth.points * 7.5), 0.4, 0.91
        )
        assert scaled == pytest.approx(base)

    def test_truncated_prediction_caps_horizon(self):
        truth = make_series(np.tile([1.0, 1.0, 1.0], (100, 1)))
        pred = make_series(truth.points[:40])
        t_v = forecast_horizon(pred, truth, 0.4, 1.0)
        assert t_v == pytest.approx(0.02 * 40)

    def test_zero_norm_truth_rejected(self):
        zeros = make_series(np.zeros((50, 3)))
        with pytest.raises(ValueError, match="zero norm"):
            forecast_horizon(zeros, zeros, 0.4, 1.0)

    def test_mismatched_dt_rejected(self):
        truth = make_series(np.ones((50, 3)), dt=0.02)
        pred = make_series(np.ones((50, 3)), dt=0.1)
        with pytest.raises(ValueError, match="sampling steps"):
            forecast_horizon(pred, truth, 0.4, 1.0)


def test_dominant_period_on_pure_sine():
    n = 4096
    t = np.arange(n)
    z = np.sin(2 * np.pi * t / 128.0)
    series = make_series(np.column_stack([np.cos(2 * np.pi * t / 128.0), z, z]), dt=1.0)
    assert dominant_period_steps(series) == 128


class TestRosenstein:
    def test_limit_cycle_has_vanishing_exponent(self):
        t = np.arange(6000) * 0.02
        pts = np.column_stack([np.sin(t), np.cos(t), np.sin(2 * t)])
        series = make_series(pts, dt=0.02)
        lam = rosenstein_lyapunov(series, mean_period_steps=None, fit_range=(22, 60), horizon_steps=165)
        assert abs(lam) <= 0.01 * 0.91

    def test_true_lorenz_estimate(self):
        pre = metric_preset("lorenz63")
        traj = generate_dataset(flow_preset("lorenz63"), 20000, discard=1000)
        lam = rosenstein_lyapunov(traj, pre.theiler_steps, pre.lyap_fit_range, pre.lyap_horizon_steps)
        assert lam == pytest.approx(0.91, rel=0.10)

    def test_direction_sensitivity_and_cap_stability(self):
        pre = metric_preset("lorenz63")
        traj = generate_dataset(flow_preset("lorenz63"), 12000, discard=1000)
        forward = rosenstein_lyapunov(traj, pre.theiler_steps, pre.lyap_fit_range, pre.lyap_horizon_steps)
        reversed_series = make_series(traj.points[::-1], dt=traj.dt)
        backward = rosenstein_lyapunov(
            reversed_series, pre.theiler_steps, pre.lyap_fit_range, pre.lyap_horizon_steps
        )
        assert abs(backward - forward) > 0.1 * abs(forward)
        halved = rosenstein_lyapunov(
            traj, pre.theiler_steps, pre.lyap_fit_range, pre.lyap_horizon_steps, sample_cap=2000
        )
        assert halved == pytest.approx(forward, rel=0.05)

    def test_short_series_rejected(self):
        series = make_series(np.random.default_rng(3).normal(size=(100, 3)))
        with pytest.raises(ValueError, match="below 10"):
            rosenstein_lyapunov(series, 5, (2, 8), 20)

    def test_bad_fit_range_rejected(self):
        series = make_series(np.random.default_rng(4).normal(size=(500, 3)))
        with pytest.raises(ValueError, match="fit_range"):
            rosenstein_lyapunov(series, 5, (10, 5), 20)


class TestCorrelationDimension:
    def test_uniform_square_scores_two(self):
        # fit below ~10% of the edge length; larger radii feel the boundary
        rng = np.random.default_rng(5)
        pts = np.column_stack([rng.uniform(0, 1, 4000), rng.uniform(0, 1, 4000), np.zeros(4000)])
        dim = correlation_dimension(
            make_series(pts), r_grid=np.geomspace(0.003, 1.0, 24), fit_range=(0.01, 0.1), theiler=0
        )
        assert dim == pytest.approx(2.0, abs=0.1)

    def test_uniform_segment_scores_one(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0, 1, 4000)
        pts = np.column_stack([x, 2 * x, -x])
        dim = correlation_dimension(
            make_series(pts), r_grid=np.geomspace(0.005, 2.0, 24), fit_range=(0.02, 0.3), theiler=0
        )
        assert dim == pytest.approx(1.0, abs=0.1)

    def test_true_lorenz_estimate(self):
        pre = metric_preset("lorenz63")
        traj = generate_dataset(flow_preset("lorenz63"), 20000, discard=1000)
        dim = correlation_dimension(
            traj, r_grid=pre.cd_r_grid, fit_range=pre.cd_fit_range, theiler=pre.theiler_steps
        )
        assert dim == pytest.approx(2.052, rel=0.05)

    def test_empty_fit_window_rejected(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(0, 1, size=(1500, 3))
        with pytest.raises(ValueError, match="empty"):
            correlation_dimension(
                make_series(pts), r_grid=np.geomspace(1e-9, 1e-7, 10), fit_range=(1e-9, 1e-7), theiler=0
            )

    def test_short_series_rejected(self):
        with pytest.raises(ValueError, match="1000-point minimum"):
            correlation_dimension(make_series(np.zeros((500, 3))), theiler=0)
