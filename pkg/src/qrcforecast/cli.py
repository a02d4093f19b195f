"""Command-line entry points for dataset generation, training and runs."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .chaos import TimeSeries, flow_preset, generate_dataset, split_trajectories
from .harness import (
    RunManifest,
    SweepSpec,
    derive_seed,
    emit_report,
    noise_sweep,
    read_reports_csv,
    run_experiment,
    summarize,
    sweep,
)
from .metrics import correlation_dimension, forecast_horizon, rosenstein_lyapunov
from .presets import metric_preset
from .readout import ExperimentConfig, ReadoutModel, predict_closed_loop, rebuild_bank, train

CONFIG_FIELDS = [
    ("system", str, "chaotic system preset"),
    ("cycles", int, "evolve-measure cycles per input"),
    ("n_reservoirs", int, "number of parallel reservoirs"),
    ("poly_degree", int, "highest feature power"),
    ("beta", float, "ridge regularization"),
    ("a", float, "low end of the encoding interval"),
    ("b", float, "high end of the encoding interval"),
    ("n_sync", int, "synchronization steps"),
    ("n_train", int, "training steps"),
    ("n_pred", int, "prediction steps"),
    ("n_stat", int, "number of realizations"),
    ("seed", int, "master seed"),
]


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON file with configuration fields")
    for name, ctor, help_text in CONFIG_FIELDS:
        parser.add_argument(f"--{name.replace('_', '-')}", type=ctor, default=None, help=help_text)


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    fields: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        fields.update({k: v for k, v in data.items() if k in {n for n, _, _ in CONFIG_FIELDS}})
    for name, _, _ in CONFIG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    return ExperimentConfig(**fields).validate()


def _cmd_generate(args) -> int:
    spec = flow_preset(args.system)
    if args.dt is not None:
        spec = spec.with_overrides(dt=args.dt)
    series = generate_dataset(spec, total_steps=args.steps, discard=args.discard)
    series.to_csv(args.out)
    print(f"wrote {len(series)} steps of {args.system} to {args.out}")
    return 0


def _realization_window(config: ExperimentConfig, index: int, discard: int) -> TimeSeries:
    window_len = config.n_sync + config.n_train + config.n_pred
    flow = flow_preset(config.system)
    data = generate_dataset(flow, total_steps=window_len * (index + 1), discard=discard)
    return split_trajectories(data, index + 1, window_len)[index]


def _cmd_train(args) -> int:
    config = _build_config(args)
    window = _realization_window(config, args.realization, args.discard)
    rng = np.random.default_rng(derive_seed(config.seed, args.realization))
    model, _ = train(window.slice(0, config.n_sync + config.n_train), config, rng)
    model.save(args.out)
    print(f"saved model ({model.w_out.shape[0]}x{model.w_out.shape[1]} readout) to {args.out}")
    return 0


def _cmd_predict(args) -> int:
    model = ReadoutModel.load(args.model)
    config = model.config
    window = _realization_window(config, args.realization, args.discard)
    bank = rebuild_bank(model, window.slice(0, config.n_sync + config.n_train))
    pred, diverged = predict_closed_loop(model, bank, args.steps)
    pred.to_csv(args.out)
    if args.truth_out:
        length = config.n_sync + config.n_train
        window.slice(length, length + args.steps).to_csv(args.truth_out)
    print(f"wrote {len(pred)} predicted steps to {args.out}" + (" (diverged)" if diverged else ""))
    return 0


def _cmd_evaluate(args) -> int:
    pred = TimeSeries.from_csv(args.pred, kind="predicted")
    truth = TimeSeries.from_csv(args.truth)
    preset = metric_preset(args.system)
    preset = preset.with_overrides(
        theiler_steps=args.theiler,
        lyap_horizon_steps=args.lyap_horizon,
    )
    result = {
        "forecast_horizon_lyap": forecast_horizon(pred, truth, args.e_max, preset.lambda_max)
    }
    for name, fn in (
        ("lambda_max", lambda: rosenstein_lyapunov(
            pred, preset.theiler_steps, preset.lyap_fit_range, preset.lyap_horizon_steps
        )),
        ("corr_dim", lambda: correlation_dimension(
            pred, r_grid=preset.cd_r_grid, fit_range=preset.cd_fit_range, theiler=preset.theiler_steps
        )),
    ):
        try:
            result[name] = fn()
        except ValueError as exc:
            result[name] = None
            result[f"{name}_note"] = str(exc)
    print(json.dumps(result, indent=1))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(result, fh, indent=1)
    return 0


def _cmd_run(args) -> int:
    config = _build_config(args)
    manifest = RunManifest.from_config(config, output_dir=str(args.out), discard=args.discard)
    reports, summary = run_experiment(manifest, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest.save(out / "manifest.json")
    formats = ("csv",) if args.no_figures else ("csv", "svg")
    written = emit_report(reports, summary, out, config, formats=formats)
    for key in ("horizon_mean", "horizon_std", "lambda_max_median", "corr_dim_median", "n_diverged"):
        print(f"{key}: {summary[key]}")
    print("wrote " + ", ".join(str(p) for p in written))
    return 0


def _cmd_sweep(args) -> int:
    config = _build_config(args)
    base = RunManifest.from_config(config, discard=args.discard)
    spec = SweepSpec(
        budget=args.budget,
        n_stat=args.trial_stat,
        mode=args.mode,
        beta_choices=tuple(float(b) for b in args.betas.split(",")) if args.betas else (),
    )
    rows = sweep(spec, base, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "trials.csv"
    _write_dict_rows(path, rows)
    best = rows[0]
    print(f"best trial: {best}")
    print(f"wrote {path}")
    return 0


def _cmd_noise_sweep(args) -> int:
    config = _build_config(args)
    base = RunManifest.from_config(config, discard=args.discard)
    gammas = [float(g) for g in args.gammas.split(",")]
    rows = noise_sweep(base, gammas, substeps=args.substeps, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "noise.csv"
    _write_dict_rows(path, rows)
    if not args.no_figures:
        from . import plots

        plots.noise_curve(rows, out / "noise_curve.svg")
    for row in rows:
        print(f"gamma={row['gamma']:g}: horizon {row['horizon_mean']} +- {row['horizon_std']}")
    print(f"wrote {path}")
    return 0


def _cmd_report(args) -> int:
    reports, meta = read_reports_csv(args.reports)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    from . import plots

    try:
        preset = metric_preset(meta["system"])
    except ValueError:
        preset = None
    plots.horizon_boxplot(reports, out / "horizon_box.svg", label=meta["system"])
    plots.climate_scatter(reports, out / "climate_scatter.svg", preset=preset)
    print(json.dumps(summarize(reports), indent=1))
    print(f"wrote figures to {out}")
    return 0


def _write_dict_rows(path, rows: list[dict]) -> None:
    import csv as _csv

    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    with open(path, "w", newline="") as fh:
        writer = _csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrcforecast",
        description="Forecast chaotic flows with simulated four-qubit quantum reservoirs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="integrate a flow preset and write a CSV trajectory")
    p.add_argument("--system", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--discard", type=int, default=1000)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("train", help="train one realization and persist the model as JSON")
    _add_config_args(p)
    p.add_argument("--realization", type=int, default=0)
    p.add_argument("--discard", type=int, default=1000)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("predict", help="closed-loop forecast from a saved model")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--realization", type=int, default=0)
    p.add_argument("--discard", type=int, default=1000)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--truth-out", type=Path, default=None)
    p.set_defaults(fn=_cmd_predict)

    p = sub.add_parser("evaluate", help="score a prediction CSV against a truth CSV")
    p.add_argument("--pred", type=Path, required=True)
    p.add_argument("--truth", type=Path, required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--e-max", type=float, default=0.4)
    p.add_argument("--theiler", type=int, default=None)
    p.add_argument("--lyap-horizon", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("run", help="full multi-realization experiment with reports and figures")
    _add_config_args(p)
    p.add_argument("--discard", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="random or grid hyperparameter search")
    _add_config_args(p)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--trial-stat", type=int, default=5)
    p.add_argument("--mode", choices=["random", "grid"], default="random")
    p.add_argument("--betas", default="", help="comma list of betas (grid mode)")
    p.add_argument("--discard", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("noise-sweep", help="re-run with dephasing noise over a gamma grid")
    _add_config_args(p)
    p.add_argument("--gammas", required=True, help="comma list, e.g. 0,1e-4,1e-2")
    p.add_argument("--substeps", type=int, default=400)
    p.add_argument("--discard", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(fn=_cmd_noise_sweep)

    p = sub.add_parser("report", help="re-render figures and summary from a reports.csv")
    p.add_argument("--reports", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
