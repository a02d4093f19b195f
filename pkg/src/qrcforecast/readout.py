"""Polynomial readout features, ridge training and closed-loop forecasting.

The readout maps the reservoir feature vector of step k to the next input
of the series. A feature vector is the raw reservoir output together with
its element-wise powers and a leading constant bias; the map is a single
matrix fitted by ridge regression over the training phase. Forecasting
feeds each output back as the next input with the readout held fixed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .chaos import TimeSeries
from .preprocess import Scaler, fit_scaler
from .reservoir import (
    DEFAULT_N_QUBITS,
    HamiltonianSpec,
    NoiseModel,
    ReservoirBank,
    sample_hamiltonian,
)

MAX_POLY_DEGREE = 4


class RidgeSolveError(RuntimeError):
    """Raised when the regularized normal equations cannot be solved."""


@dataclass
class ExperimentConfig:
    """Full hyperparameter set plus run sizes and the master seed."""

    system: str = "lorenz63"
    cycles: int = 3  # evolve-measure cycles per input
    n_reservoirs: int = 1
    poly_degree: int = 1  # highest element-wise feature power
    beta: float = 1e-10  # ridge regularization
    a: float = 0.1  # low end of the encoding interval
    b: float = 0.9  # high end of the encoding interval
    n_sync: int = 100
    n_train: int = 2000
    n_pred: int = 2000
    n_stat: int = 20
    seed: int = 0

    def validate(self) -> "ExperimentConfig":
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if self.n_reservoirs < 1:
            raise ValueError("n_reservoirs must be >= 1")
        if self.poly_degree not in range(1, MAX_POLY_DEGREE + 1):
            raise ValueError(f"poly_degree must be in 1..{MAX_POLY_DEGREE}")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not (0.0 <= self.a < self.b <= 1.0):
            raise ValueError("need 0 <= a < b <= 1")
        for name in ("n_sync", "n_train", "n_pred", "n_stat"):
            if getattr(self, name) < 0 or (name == "n_train" and self.n_train < 2):
                raise ValueError(f"{name} out of range")
        return self

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs).validate()

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "cycles": self.cycles,
            "n_reservoirs": self.n_reservoirs,
            "poly_degree": self.poly_degree,
            "beta": self.beta,
            "a": self.a,
            "b": self.b,
            "n_sync": self.n_sync,
            "n_train": self.n_train,
            "n_pred": self.n_pred,
            "n_stat": self.n_stat,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d).validate()


def feature_length(n_nodes: int, poly_degree: int) -> int:
    return poly_degree * n_nodes + 1


def build_features(p: np.ndarray, poly_degree: int) -> np.ndarray:
    """Stack [1, p, p**2, ..., p**degree] with element-wise powers."""
    if poly_degree not in range(1, MAX_POLY_DEGREE + 1):
        raise ValueError(f"poly_degree must be in 1..{MAX_POLY_DEGREE}")
    p = np.asarray(p, dtype=float)
    out = np.empty(poly_degree * p.size + 1)
    out[0] = 1.0
    power = p
    out[1 : 1 + p.size] = power
    for g in range(2, poly_degree + 1):
        power = power * p
        out[1 + (g - 1) * p.size : 1 + g * p.size] = power
    return out


def ridge_fit(q_matrix: np.ndarray, y_matrix: np.ndarray, beta: float) -> np.ndarray:
    """Solve W (Q Q^T + beta I) = Y Q^T for the readout matrix W.

    Uses a Cholesky factorization of the regularized Gram matrix plus one
    step of iterative refinement; never forms an explicit inverse. At very
    small beta the floating-point Gram matrix can fail to be numerically
    positive definite (spurious eigenvalues around -1e-10 from accumulation
    error); in that case the solve falls back to the spectral form with the
    noise eigenvalues clipped at zero, which is the same regularized
    solution. Raises :class:`RidgeSolveError` with a condition estimate if
    neither path succeeds.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    q_matrix = np.asarray(q_matrix, dtype=float)
    y_matrix = np.atleast_2d(np.asarray(y_matrix, dtype=float))
    if q_matrix.ndim != 2 or q_matrix.shape[1] != y_matrix.shape[1]:
        raise ValueError(
            f"feature/target column mismatch: {q_matrix.shape} vs {y_matrix.shape}"
        )
    gram = q_matrix @ q_matrix.T
    gram = 0.5 * (gram + gram.T)
    gram[np.diag_indices_from(gram)] += beta
    rhs = q_matrix @ y_matrix.T
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        solution = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
        # one refinement step tightens the residual at tiny beta
        residual = rhs - gram @ solution
        solution += scipy.linalg.cho_solve(factor, residual, check_finite=False)
    except scipy.linalg.LinAlgError:
        try:
            eigenvalues, vectors = np.linalg.eigh(gram)
        except np.linalg.LinAlgError as exc:
            raise RidgeSolveError(
                f"regularized Gram matrix could not be factorized (beta={beta:.3e})"
            ) from exc
        clipped = np.maximum(eigenvalues - beta, 0.0) + beta
        solution = vectors @ ((vectors.T @ rhs) / clipped[:, None])
    if not np.all(np.isfinite(solution)):
        eigs = np.linalg.eigvalsh(gram)
        cond = float(eigs[-1] / eigs[0]) if eigs[0] > 0 else np.inf
        raise RidgeSolveError(
            f"ridge solve produced non-finite coefficients "
            f"(beta={beta:.3e}, condition estimate {cond:.3e})"
        )
    return solution.T


@dataclass
class ReadoutModel:
    """Fitted readout matrix plus everything needed to run the closed loop."""

    w_out: np.ndarray  # (d, feature_length)
    beta: float
    poly_degree: int
    scaler: Scaler
    config: ExperimentConfig
    hamiltonians: list[HamiltonianSpec] = field(default_factory=list)
    kickoff: np.ndarray | None = None  # scaled final training input
    dt: float = 1.0  # sampling step of the training series

    def feature_dim(self) -> int:
        return self.w_out.shape[1]

    def to_dict(self) -> dict:
        return {
            "w_out": [[float(v) for v in row] for row in self.w_out],
            "beta": self.beta,
            "poly_degree": self.poly_degree,
            "scaler": self.scaler.to_dict(),
            "config": self.config.to_dict(),
            "hamiltonians": [spec.to_dict() for spec in self.hamiltonians],
            "kickoff": None if self.kickoff is None else [float(v) for v in self.kickoff],
            "dt": self.dt,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReadoutModel":
        return cls(
            w_out=np.asarray(d["w_out"], dtype=float),
            beta=float(d["beta"]),
            poly_degree=int(d["poly_degree"]),
            scaler=Scaler.from_dict(d["scaler"]),
            config=ExperimentConfig.from_dict(d["config"]),
            hamiltonians=[HamiltonianSpec.from_dict(h) for h in d.get("hamiltonians", [])],
            kickoff=None if d.get("kickoff") is None else np.asarray(d["kickoff"], dtype=float),
            dt=float(d.get("dt", 1.0)),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "ReadoutModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def train(
    series: TimeSeries,
    config: ExperimentConfig,
    rng: np.random.Generator,
    noise: NoiseModel | None = None,
) -> tuple[ReadoutModel, ReservoirBank]:
    """Fit the readout on one trajectory window.

    Scales the first ``n_sync + n_train`` points, synchronizes the freshly
    drawn reservoirs on the first ``n_sync`` inputs, then collects feature
    vectors for the next ``n_train - 1`` inputs against the subsequent
    (scaled) series values and solves the ridge problem. Returns the model
    together with the bank in its end-of-training state.
    """
    config.validate()
    length = config.n_sync + config.n_train
    if len(series) < length:
        raise ValueError(f"series has {len(series)} points, training needs {length}")

    scaler = fit_scaler(series.points[:length], config.a, config.b)
    scaled = scaler.transform_array(series.points[:length])

    specs = [
        sample_hamiltonian(rng, n_qubits=DEFAULT_N_QUBITS, cycles=config.cycles)
        for _ in range(config.n_reservoirs)
    ]
    bank = ReservoirBank(specs, noise=noise)
    bank.reset()

    for k in range(config.n_sync):
        bank.step(scaled[k])

    n_cols = config.n_train - 1
    dim_q = feature_length(bank.output_dim, config.poly_degree)
    q_matrix = np.empty((dim_q, n_cols))
    y_matrix = np.empty((scaled.shape[1], n_cols))
    for col in range(n_cols):
        k = config.n_sync + col
        p = bank.step(scaled[k])
        q_matrix[:, col] = build_features(p, config.poly_degree)
        y_matrix[:, col] = scaled[k + 1]

    w_out = ridge_fit(q_matrix, y_matrix, config.beta)
    model = ReadoutModel(
        w_out=w_out,
        beta=config.beta,
        poly_degree=config.poly_degree,
        scaler=scaler,
        config=config,
        hamiltonians=specs,
        kickoff=scaled[length - 1].copy(),
        dt=series.dt,
    )
    return model, bank


def predict_closed_loop(
    model: ReadoutModel, bank: ReservoirBank, n_pred: int
) -> tuple[TimeSeries, bool]:
    """Continue the series autonomously for ``n_pred`` steps.

    Each output is recorded unclamped (and reported in original units), but
    is clamped to [0, 1] before being injected as the next input so it stays
    a valid encoding amplitude. Returns ``(series, diverged)``; on a
    non-finite output the series is truncated at that step and flagged.
    """
    if model.kickoff is None:
        raise ValueError("model has no final training input recorded")
    dim = model.scaler.dim
    outputs = np.empty((n_pred, dim))
    diverged = False
    x = model.kickoff
    w_out = model.w_out
    degree = model.poly_degree
    n_done = 0
    for k in range(n_pred):
        p = bank.step(x)
        o = w_out @ build_features(p, degree)
        if not np.all(np.isfinite(o)):
            diverged = True
            break
        outputs[k] = o
        n_done = k + 1
        x = np.clip(o, 0.0, 1.0)
    points = model.scaler.inverse_array(outputs[:n_done]) if n_done else np.empty((0, dim))
    return TimeSeries(points, dt=model.dt, kind="predicted"), diverged


def rebuild_bank(model: ReadoutModel, series: TimeSeries, noise: NoiseModel | None = None) -> ReservoirBank:
    """Re-drive a persisted model's reservoirs to the end-of-training state.

    Replays the synchronization and training inputs through the stored
    Hamiltonians without refitting; the result matches the bank returned by
    :func:`train` exactly.
    """
    config = model.config
    length = config.n_sync + config.n_train
    if len(series) < length:
        raise ValueError(f"series has {len(series)} points, replay needs {length}")
    scaled = model.scaler.transform_array(series.points[:length])
    bank = ReservoirBank(model.hamiltonians, noise=noise)
    bank.reset()
    for k in range(length - 1):
        bank.step(scaled[k])
    return bank
