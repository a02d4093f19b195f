"""Quantum-reservoir forecasting of three-dimensional chaotic flows."""

from .chaos import FlowSpec, TimeSeries, flow_eval, flow_preset, generate_dataset, rk4_step, split_trajectories
from .harness import RunManifest, SweepSpec, emit_report, noise_sweep, run_experiment, sweep
from .metrics import EvaluationReport, correlation_dimension, forecast_horizon, rosenstein_lyapunov
from .preprocess import Scaler, fit_scaler
from .presets import MetricPreset, metric_preset
from .qcore import (
    check_density_matrix,
    embed_single,
    expectation,
    hermitian_eig,
    kron,
    partial_trace,
    unitary_from_hamiltonian,
)
from .readout import (
    ExperimentConfig,
    ReadoutModel,
    build_features,
    predict_closed_loop,
    rebuild_bank,
    ridge_fit,
    train,
)
from .reservoir import (
    HamiltonianSpec,
    NoiseModel,
    ObservableSet,
    ReservoirBank,
    evolve_measure,
    inject_input,
    lindblad_evolve,
    sample_bank,
    sample_hamiltonian,
)

__version__ = "0.1.0"

__all__ = [
    "EvaluationReport",
    "ExperimentConfig",
    "FlowSpec",
    "HamiltonianSpec",
    "MetricPreset",
    "NoiseModel",
    "ObservableSet",
    "ReadoutModel",
    "ReservoirBank",
    "RunManifest",
    "Scaler",
    "SweepSpec",
    "TimeSeries",
    "build_features",
    "check_density_matrix",
    "correlation_dimension",
    "embed_single",
    "emit_report",
    "evolve_measure",
    "expectation",
    "fit_scaler",
    "flow_eval",
    "flow_preset",
    "forecast_horizon",
    "generate_dataset",
    "hermitian_eig",
    "inject_input",
    "kron",
    "lindblad_evolve",
    "metric_preset",
    "noise_sweep",
    "partial_trace",
    "predict_closed_loop",
    "rebuild_bank",
    "ridge_fit",
    "rk4_step",
    "rosenstein_lyapunov",
    "run_experiment",
    "sample_bank",
    "sample_hamiltonian",
    "split_trajectories",
    "sweep",
    "train",
    "unitary_from_hamiltonian",
]
