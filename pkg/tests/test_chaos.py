"""Flow definitions, RK4 integration and dataset protocol tests."""

import numpy as np
import pytest

from qrcforecast.chaos import (
    DivergenceError,
    FlowSpec,
    TimeSeries,
    flow_eval,
    flow_preset,
    generate_dataset,
    rk4_step,
    rk4_step_fn,
    split_trajectories,
)

# regression bounds: max |coordinate| over 1e5 preset steps, frozen with ~20% headroom
BOUNDS = {
    "lorenz63": 55.0,
    "chen": 60.0,
    "chua": 4.0,
    "halvorsen": 16.0,
    "roessler": 27.0,
    "rucklidge": 18.5,
    "thomas": 5.0,
    "windmi": 31.0,
}


def test_lorenz_fixed_point():
    np.testing.assert_allclose(flow_eval(flow_preset("lorenz63"), [0, 0, 0]), [0, 0, 0])


def test_lorenz_direct_substitution():
    np.testing.assert_allclose(
        flow_eval(flow_preset("lorenz63"), [1, 1, 1]), [0.0, 26.0, -5.0 / 3.0], atol=1e-14
    )


def test_windmi_at_origin():
    np.testing.assert_allclose(flow_eval(flow_preset("windmi"), [0, 0, 0]), [0.0, 0.0, 1.5], atol=1e-14)


def test_unknown_system_rejected():
    with pytest.raises(ValueError, match="unknown system"):
        FlowSpec("duffing", {}, 0.1, (0, 0, 0))


def test_wrong_parameter_names_rejected():
    with pytest.raises(ValueError, match="expects parameters"):
        FlowSpec("lorenz63", {"rho": 28.0}, 0.02, (0, 0, 0))


def test_rk4_fixed_point_is_stationary():
    out = rk4_step(flow_preset("lorenz63"), [0.0, 0.0, 0.0])
    np.testing.assert_allclose(out, [0.0, 0.0, 0.0], atol=1e-15)


def test_rk4_scalar_exponential_oracle():
    # dx/dt = x, dt = 0.1: one RK4 step from 1.0 has the closed form
    # 1 + h + h^2/2 + h^3/6 + h^4/24 = 1.1051708333...
    out = rk4_step_fn(lambda s: s, np.array([1.0]), 0.1)
    assert out[0] == pytest.approx(1.1051708333333333, abs=1e-15)
    assert out[0] == pytest.approx(np.exp(0.1), abs=1e-7)


def test_rk4_matches_refined_step_oracle():
    # one dt=0.02 step against 20 substeps of dt/20; the single-step local
    # truncation error at this state is ~3e-7, so 1e-6 is a safe bound
    spec = flow_preset("lorenz63")
    state = np.array([0.0, -0.01, 9.0])
    coarse = rk4_step(spec, state)
    fine_spec = spec.with_overrides(dt=spec.dt / 20.0)
    fine = state
    for _ in range(20):
        fine = rk4_step(fine_spec, fine)
    np.testing.assert_allclose(coarse, fine, atol=1e-6)
    assert np.max(np.abs(coarse - fine)) > 1e-8  # the bound is not vacuous


def test_rk4_global_order_ratio():
    def endpoint_error(dt):
        x = np.array([1.0])
        for _ in range(round(1.0 / dt)):
            x = rk4_step_fn(lambda s: s, x, dt)
        return abs(x[0] - np.e)

    ratio = endpoint_error(0.02) / endpoint_error(0.01)
    assert 12.0 <= ratio <= 20.0


class TestGenerateDataset:
    def test_single_point_no_discard(self):
        series = generate_dataset(flow_preset("roessler"), total_steps=1, discard=0)
        assert len(series) == 1
        np.testing.assert_allclose(series.points[0], [-9.0, 0.0, 0.0])

    def test_protocol_lengths(self):
        series = generate_dataset(flow_preset("lorenz63"), total_steps=2500, discard=1000)
        assert len(series) == 2500
        assert series.dt == 0.02

    def test_deterministic(self):
        a = generate_dataset(flow_preset("thomas"), 500, discard=10)
        b = generate_dataset(flow_preset("thomas"), 500, discard=10)
        assert np.array_equal(a.points, b.points)

    def test_divergence_reported_with_step(self):
        bad = flow_preset("lorenz63").with_overrides(dt=10.0)
        with pytest.raises(DivergenceError) as err:
            generate_dataset(bad, 1000, discard=0)
        assert err.value.step is not None


class TestSplitTrajectories:
    def test_disjoint_halves(self):
        series = TimeSeries(np.arange(300).reshape(100, 3), dt=0.1)
        lo, hi = split_trajectories(series, 2, 50)
        np.testing.assert_array_equal(lo.points, series.points[:50])
        np.testing.assert_array_equal(hi.points, series.points[50:])

    def test_identity_window(self):
        series = TimeSeries(np.arange(30).reshape(10, 3), dt=0.1)
        (only,) = split_trajectories(series, 1, 10)
        np.testing.assert_array_equal(only.points, series.points)

    def test_overlapping_stride(self):
        series = TimeSeries(np.arange(30).reshape(10, 3), dt=0.1)
        windows = split_trajectories(series, 3, 4, stride=2)
        assert [w.points[0, 0] for w in windows] == [0, 6, 12]

    def test_insufficient_length_reports_requirement(self):
        series = TimeSeries(np.zeros((10, 3)), dt=0.1)
        with pytest.raises(ValueError, match="need 55 points"):
            split_trajectories(series, 10, 10, stride=5)


@pytest.mark.parametrize("system", sorted(BOUNDS))
def test_preset_trajectories_stay_bounded(system):
    series = generate_dataset(flow_preset(system), 100_000, discard=0)
    assert np.max(np.abs(series.points)) < BOUNDS[system]


def test_chua_diode_continuity():
    spec = flow_preset("chua")
    for corner in (1.0, -1.0):
        lo = flow_eval(spec, [corner - 1e-9, 0.2, -0.1])
        hi = flow_eval(spec, [corner + 1e-9, 0.2, -0.1])
        assert np.max(np.abs(hi - lo)) <= 1e-6


def test_csv_roundtrip_exact(tmp_path):
    series = generate_dataset(flow_preset("lorenz63"), 50, discard=5)
    path = tmp_path / "traj.csv"
    series.to_csv(path)
    loaded = TimeSeries.from_csv(path)
    assert loaded.dt == pytest.approx(series.dt)
    np.testing.assert_array_equal(loaded.points, series.points)
    header = path.read_text().splitlines()[0]
    assert header == "t,x,y,z"
