"""Batch orchestration: repeated runs, hyperparameter sweeps, noise sweeps.

A run manifest pins the experiment configuration, the flow used for data
generation and one derived seed per realization, which makes every random
draw in a run a pure function of the manifest. Realization seeds are
positional (hashed from the master seed and the realization index), so
adding or removing realizations never shifts the others.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .chaos import FlowSpec, TimeSeries, flow_preset, generate_dataset, split_trajectories
from .metrics import (
    DEFAULT_ERROR_THRESHOLD,
    EvaluationReport,
    correlation_dimension,
    forecast_horizon,
    rosenstein_lyapunov,
)
from .presets import MetricPreset, metric_preset
from .readout import ExperimentConfig, predict_closed_loop, train
from .reservoir import DEFAULT_LINDBLAD_SUBSTEPS, NoiseModel

DEFAULT_DISCARD = 1000
_TRIAL_TAG = 0x5452_4941  # fixed tag separating trial seeds from realization seeds

# the encoding-interval grid searched by default
INTERVAL_GRID: tuple[tuple[float, float], ...] = tuple(
    (round(0.05 * k, 2), round(1.0 - 0.05 * k, 2)) for k in range(1, 10)
)


def derive_seed(master_seed: int, *key: int) -> int:
    """Positional 64-bit seed from (master_seed, key...)."""
    state = np.random.SeedSequence([int(master_seed), *[int(k) for k in key]]).generate_state(2)
    return int(state[0]) << 32 | int(state[1])


@dataclass
class RunManifest:
    """Everything that determines a run's outputs."""

    config: ExperimentConfig
    realization_seeds: list[int]
    flow: FlowSpec
    discard: int = DEFAULT_DISCARD
    output_dir: str = "runs/latest"
    timestamp: str = ""
    noise: NoiseModel | None = None

    @classmethod
    def from_config(
        cls,
        config: ExperimentConfig,
        output_dir: str = "runs/latest",
        flow: FlowSpec | None = None,
        discard: int = DEFAULT_DISCARD,
        noise: NoiseModel | None = None,
    ) -> "RunManifest":
        config.validate()
        seeds = [derive_seed(config.seed, i) for i in range(config.n_stat)]
        return cls(
            config=config,
            realization_seeds=seeds,
            flow=flow or flow_preset(config.system),
            discard=discard,
            output_dir=output_dir,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            noise=noise,
        )

    @property
    def window_len(self) -> int:
        c = self.config
        return c.n_sync + c.n_train + c.n_pred

    def dataset_provenance(self) -> dict:
        blob = {
            "system": self.flow.system,
            "params": self.flow.params,
            "dt": self.flow.dt,
            "initial_state": list(self.flow.initial_state),
            "discard": self.discard,
        }
        digest = hashlib.sha256(json.dumps(blob, sort_keys=True).encode()).hexdigest()
        return {**blob, "hash": digest}

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "realization_seeds": self.realization_seeds,
            "dataset": self.dataset_provenance(),
            "output_dir": self.output_dir,
            "timestamp": self.timestamp,
            "noise": None
            if self.noise is None
            else {"gamma": self.noise.gamma, "substeps": self.noise.substeps},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        config = ExperimentConfig.from_dict(d["config"])
        ds = d["dataset"]
        flow = FlowSpec(ds["system"], ds["params"], ds["dt"], tuple(ds["initial_state"]))
        noise = None
        if d.get("noise") is not None:
            noise = NoiseModel(d["noise"]["gamma"], d["noise"].get("substeps", DEFAULT_LINDBLAD_SUBSTEPS))
        return cls(
            config=config,
            realization_seeds=list(d["realization_seeds"]),
            flow=flow,
            discard=int(ds.get("discard", DEFAULT_DISCARD)),
            output_dir=d.get("output_dir", "runs/latest"),
            timestamp=d.get("timestamp", ""),
            noise=noise,
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "RunManifest":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _run_realization(args) -> EvaluationReport:
    index, seed, window, config, noise, preset = args
    length = config.n_sync + config.n_train
    try:
        rng = np.random.default_rng(seed)
        model, bank = train(window.slice(0, length), config, rng, noise=noise)
        pred, diverged = predict_closed_loop(model, bank, config.n_pred)
        truth = window.slice(length, length + config.n_pred)
        horizon = forecast_horizon(pred, truth, DEFAULT_ERROR_THRESHOLD, preset.lambda_max)
    except Exception as exc:  # noqa: BLE001 - a failed realization must not kill the run
        return EvaluationReport(index, seed, None, None, None, True, note=f"failed: {exc}")

    lam = dim = None
    notes = []
    if not diverged and len(pred) == config.n_pred:
        try:
            lam = rosenstein_lyapunov(
                pred, preset.theiler_steps, preset.lyap_fit_range, preset.lyap_horizon_steps
            )
        except ValueError as exc:
            notes.append(f"lambda_max absent: {exc}")
        try:
            dim = correlation_dimension(
                pred,
                r_grid=preset.cd_r_grid,
                fit_range=preset.cd_fit_range,
                theiler=preset.theiler_steps,
            )
        except ValueError as exc:
            notes.append(f"corr_dim absent: {exc}")
    elif diverged:
        notes.append("diverged: climate metrics skipped")
    return EvaluationReport(index, seed, horizon, lam, dim, diverged, note="; ".join(notes))


def run_experiment(
    manifest: RunManifest,
    workers: int = 1,
    dataset: TimeSeries | None = None,
    preset: MetricPreset | None = None,
) -> tuple[list[EvaluationReport], dict]:
    """Train, forecast and score every realization of a manifest.

    Realization ``i`` always receives window ``i`` of the generated orbit
    and the ``i``-th derived seed; failures are recorded per realization
    and never abort the run.
    """
    config = manifest.config
    if dataset is None:
        dataset = generate_dataset(
            manifest.flow, total_steps=manifest.window_len * config.n_stat, discard=manifest.discard
        )
    windows = split_trajectories(dataset, config.n_stat, manifest.window_len)
    preset = preset or metric_preset(config.system)
    tasks = [
        (i, manifest.realization_seeds[i], windows[i], config, manifest.noise, preset)
        for i in range(config.n_stat)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_realization, tasks))
    else:
        reports = [_run_realization(t) for t in tasks]
    reports.sort(key=lambda r: r.realization)
    return reports, summarize(reports)


def _mean_std(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def summarize(reports: list[EvaluationReport]) -> dict:
    horizons = [r.forecast_horizon for r in reports if r.forecast_horizon is not None]
    lams = [r.lambda_max for r in reports if r.lambda_max is not None]
    dims = [r.corr_dim for r in reports if r.corr_dim is not None]
    h_mean, h_std = _mean_std(horizons)
    l_mean, l_std = _mean_std(lams)
    d_mean, d_std = _mean_std(dims)
    return {
        "n_realizations": len(reports),
        "n_diverged": sum(r.diverged for r in reports),
        "horizon_mean": h_mean,
        "horizon_std": h_std,
        "lambda_max_mean": l_mean,
        "lambda_max_std": l_std,
        "lambda_max_median": float(np.median(lams)) if lams else None,
        "corr_dim_mean": d_mean,
        "corr_dim_std": d_std,
        "corr_dim_median": float(np.median(dims)) if dims else None,
        "n_lambda_max": len(lams),
        "n_corr_dim": len(dims),
    }


@dataclass
class SweepSpec:
    """Search space and budget for hyperparameter exploration."""

    budget: int
    n_stat: int = 5  # realizations per trial
    mode: str = "random"  # "random" or "grid"
    cycles_choices: tuple = tuple(range(1, 16))
    n_reservoirs_choices: tuple = (1, 2, 3)
    poly_degree_choices: tuple = (1, 2, 3, 4)
    interval_choices: tuple = INTERVAL_GRID
    beta_log_range: tuple = (-20.0, 3.0)  # log10 bounds, random mode
    beta_choices: tuple = ()  # explicit betas, grid mode

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.mode not in ("random", "grid"):
            raise ValueError("mode must be 'random' or 'grid'")
        if self.mode == "grid" and not self.beta_choices:
            raise ValueError("grid mode needs explicit beta_choices")


def _grid_trials(spec: SweepSpec) -> list[dict]:
    trials = []
    for cycles in spec.cycles_choices:
        for n_res in spec.n_reservoirs_choices:
            for degree in spec.poly_degree_choices:
                for a, b in spec.interval_choices:
                    for beta in spec.beta_choices:
                        trials.append(
                            dict(cycles=cycles, n_reservoirs=n_res, poly_degree=degree, a=a, b=b, beta=beta)
                        )
    return trials[: spec.budget]


def sweep(spec: SweepSpec, base: RunManifest, workers: int = 1) -> list[dict]:
    """Evaluate trial configurations ranked by mean forecast horizon."""
    master = base.config.seed
    dataset = generate_dataset(
        base.flow, total_steps=base.window_len * spec.n_stat, discard=base.discard
    )
    if spec.mode == "grid":
        candidates = _grid_trials(spec)
    else:
        candidates = []
        for t in range(spec.budget):
            rng = np.random.default_rng(derive_seed(master, _TRIAL_TAG, t, 1))
            a, b = spec.interval_choices[rng.integers(len(spec.interval_choices))]
            candidates.append(
                dict(
                    cycles=int(rng.choice(spec.cycles_choices)),
                    n_reservoirs=int(rng.choice(spec.n_reservoirs_choices)),
                    poly_degree=int(rng.choice(spec.poly_degree_choices)),
                    a=a,
                    b=b,
                    beta=float(10.0 ** rng.uniform(*spec.beta_log_range)),
                )
            )

    results = []
    for t, params in enumerate(candidates):
        trial_seed = derive_seed(master, _TRIAL_TAG, t)
        config = replace(base.config, n_stat=spec.n_stat, seed=trial_seed, **params)
        manifest = replace(base, config=config, realization_seeds=[
            derive_seed(trial_seed, i) for i in range(spec.n_stat)
        ])
        try:
            reports, summary = run_experiment(manifest, workers=workers, dataset=dataset)
            horizon = summary["horizon_mean"]
        except Exception as exc:  # noqa: BLE001 - failed trials score zero
            reports, summary, horizon = [], {}, None
            params = {**params, "error": str(exc)}
        results.append(
            {
                "trial": t,
                **params,
                "horizon_mean": 0.0 if horizon is None else horizon,
                "horizon_std": summary.get("horizon_std"),
                "n_diverged": summary.get("n_diverged"),
            }
        )
    results.sort(key=lambda row: row["horizon_mean"], reverse=True)
    return results


def noise_sweep(
    base: RunManifest,
    gammas,
    substeps: int = DEFAULT_LINDBLAD_SUBSTEPS,
    workers: int = 1,
) -> list[dict]:
    """Re-run the experiment with dephasing dynamics for each noise level."""
    if base.config.n_reservoirs != 1:
        raise ValueError("noise sweeps use a single reservoir (n_reservoirs=1)")
    dataset = generate_dataset(
        base.flow, total_steps=base.window_len * base.config.n_stat, discard=base.discard
    )
    rows = []
    for gamma in gammas:
        manifest = replace(base, noise=NoiseModel(float(gamma), substeps))
        reports, summary = run_experiment(manifest, workers=workers, dataset=dataset)
        rows.append({"gamma": float(gamma), **summary})
    return rows


CSV_HEADER = [
    "realization",
    "seed",
    "system",
    "V",
    "r",
    "G",
    "beta",
    "a",
    "b",
    "forecast_horizon_lyap",
    "lambda_max",
    "corr_dim",
    "diverged",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".17g")
    return str(value)


def write_reports_csv(path, reports: list[EvaluationReport], config: ExperimentConfig) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            writer.writerow(
                [
                    r.realization,
                    r.seed,
                    config.system,
                    config.cycles,
                    config.n_reservoirs,
                    config.poly_degree,
                    _fmt(config.beta),
                    _fmt(config.a),
                    _fmt(config.b),
                    _fmt(r.forecast_horizon),
                    _fmt(r.lambda_max),
                    _fmt(r.corr_dim),
                    "true" if r.diverged else "false",
                ]
            )


def read_reports_csv(path) -> tuple[list[EvaluationReport], dict]:
    """Read a reports.csv back; returns the reports and the config columns."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path} contains no report rows")
    reports = []
    for row in rows:
        reports.append(
            EvaluationReport(
                realization=int(row["realization"]),
                seed=int(row["seed"]),
                forecast_horizon=float(row["forecast_horizon_lyap"]) if row["forecast_horizon_lyap"] else None,
                lambda_max=float(row["lambda_max"]) if row["lambda_max"] else None,
                corr_dim=float(row["corr_dim"]) if row["corr_dim"] else None,
                diverged=row["diverged"] == "true",
            )
        )
    meta = {k: rows[0][k] for k in ("system", "V", "r", "G", "beta", "a", "b")}
    return reports, meta


def emit_report(
    reports: list[EvaluationReport],
    summary: dict,
    output_dir,
    config: ExperimentConfig,
    formats=("csv", "svg"),
    preset: MetricPreset | None = None,
) -> list[Path]:
    """Write reports.csv (and summary.json), optionally the two figures."""
    if not reports:
        raise ValueError("nothing to report")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        csv_path = out / "reports.csv"
        write_reports_csv(csv_path, reports, config)
        written.append(csv_path)
        summary_path = out / "summary.json"
        with open(summary_path, "w") as fh:
            json.dump(summary, fh, indent=1)
        written.append(summary_path)
    if "svg" in formats:
        from . import plots

        if preset is None:
            try:
                preset = metric_preset(config.system)
            except ValueError:
                preset = None
        box_path = out / "horizon_box.svg"
        plots.horizon_boxplot(reports, box_path, label=config.system)
        written.append(box_path)
        scatter_path = out / "climate_scatter.svg"
        plots.climate_scatter(reports, scatter_path, preset=preset)
        written.append(scatter_path)
    return written
