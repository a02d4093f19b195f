"""Diagnostic figures for run reports (written next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def horizon_boxplot(reports, path, label: str = "") -> None:
    """Box-and-whisker plot of the per-realization forecast horizons."""
    values = [r.forecast_horizon for r in reports if r.forecast_horizon is not None]
    fig, ax = plt.subplots(figsize=(4, 4))
    if values:
        ax.boxplot([values], tick_labels=[label or "run"])
    ax.set_ylabel("forecast horizon [Lyapunov times]")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def climate_scatter(reports, path, preset=None) -> None:
    """Largest Lyapunov exponent vs correlation dimension per realization.

    When a preset with reference values is given, a crosshair marks the
    reference point and the axes are widened to cover at least the
    reference +/- 5 sigma box.
    """
    pairs = [
        (r.corr_dim, r.lambda_max)
        for r in reports
        if r.corr_dim is not None and r.lambda_max is not None
    ]
    fig, ax = plt.subplots(figsize=(5, 4))
    if pairs:
        xs, ys = zip(*pairs)
        ax.scatter(xs, ys, s=14, alpha=0.7, label="realizations")
    if preset is not None:
        ax.axvline(preset.corr_dim, color="k", lw=0.8)
        ax.axhline(preset.lambda_max, color="k", lw=0.8)
        x_pad = 5 * preset.corr_dim_std
        y_pad = 5 * preset.lambda_std
        x_lo = min([preset.corr_dim - x_pad] + [p[0] for p in pairs])
        x_hi = max([preset.corr_dim + x_pad] + [p[0] for p in pairs])
        y_lo = min([preset.lambda_max - y_pad] + [p[1] for p in pairs])
        y_hi = max([preset.lambda_max + y_pad] + [p[1] for p in pairs])
        ax.set_xlim(x_lo, x_hi)
        ax.set_ylim(y_lo, y_hi)
    ax.set_xlabel("correlation dimension")
    ax.set_ylabel("largest Lyapunov exponent")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def noise_curve(rows, path) -> None:
    """Mean forecast horizon against the dephasing strength."""
    gammas = [row["gamma"] for row in rows]
    means = [row.get("horizon_mean") or 0.0 for row in rows]
    stds = [row.get("horizon_std") or 0.0 for row in rows]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.errorbar(gammas, means, yerr=stds, marker="o")
    ax.set_xscale("symlog", linthresh=1e-6)
    ax.set_xlabel("dephasing strength")
    ax.set_ylabel("mean forecast horizon [Lyapunov times]")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
