"""Prediction scoring: forecast horizon and attractor climate statistics.

Short-term quality is the forecast horizon: the time (in Lyapunov times)
for which the normalized error between prediction and truth stays under a
threshold. Long-term ("climate") quality is measured by the largest
Lyapunov exponent, estimated with Rosenstein's nearest-neighbor divergence
method, and by the correlation dimension from the Grassberger-Procaccia
correlation integral. Both estimators work directly on the 3-d state
vectors; no delay embedding is performed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .chaos import TimeSeries

DEFAULT_ERROR_THRESHOLD = 0.4
DEFAULT_SAMPLE_CAP = 4000
_CHUNK = 256


@dataclass
class EvaluationReport:
    """Per-realization scores; a metric is None when it could not be computed."""

    realization: int
    seed: int
    forecast_horizon: float | None
    lambda_max: float | None
    corr_dim: float | None
    diverged: bool
    note: str = ""


def forecast_horizon(
    pred: TimeSeries,
    truth: TimeSeries,
    e_max: float = DEFAULT_ERROR_THRESHOLD,
    lambda_ref: float = 1.0,
) -> float:
    """Duration (in Lyapunov times) of the initial accurate stretch.

    The error at each step is the Euclidean distance to the truth divided
    by the root mean square norm of the whole truth segment. The horizon
    counts consecutive initial steps with error below ``e_max`` and converts
    to Lyapunov times via ``dt * steps * lambda_ref``. A prediction shorter
    than the truth (truncated on divergence) caps the count at its length.
    """
    if lambda_ref <= 0:
        raise ValueError("lambda_ref must be positive")
    if abs(pred.dt - truth.dt) > 1e-12:
        raise ValueError(f"sampling steps differ: {pred.dt} vs {truth.dt}")
    if len(pred) > len(truth):
        raise ValueError("prediction is longer than the truth segment")
    denom = float(np.sqrt(np.mean(np.sum(truth.points**2, axis=1))))
    if denom == 0.0:
        raise ValueError("truth segment has zero norm; error normalization undefined")
    if len(pred) == 0:
        return 0.0
    err = np.linalg.norm(truth.points[: len(pred)] - pred.points, axis=1) / denom
    breached = err >= e_max
    s_v = int(np.argmax(breached)) if breached.any() else len(pred)
    return truth.dt * s_v * lambda_ref


def dominant_period_steps(series: TimeSeries, component: int = 2) -> int:
    """Mean orbital period in steps, from the strongest spectral peak.

    Uses the given component (default: the third, conventionally z) after
    mean removal. Falls back to the last component for lower-dimensional
    data.
    """
    pts = series.points
    comp = min(component, pts.shape[1] - 1)
    signal = pts[:, comp] - pts[:, comp].mean()
    power = np.abs(np.fft.rfft(signal)) ** 2
    if len(power) < 2:
        raise ValueError("series too short for a period estimate")
    k_peak = int(np.argmax(power[1:])) + 1
    return max(1, round(len(signal) / k_peak))


def rosenstein_lyapunov(
    series: TimeSeries,
    mean_period_steps: int | None,
    fit_range: tuple[int, int],
    horizon_steps: int,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
) -> float:
    """Largest Lyapunov exponent from mean log nearest-neighbor divergence.

    For (a deterministic, evenly spaced subsample of) reference points, the
    nearest neighbor with temporal separation beyond ``mean_period_steps``
    is tracked for ``horizon_steps`` steps; the slope of the mean log
    distance over ``fit_range`` (a step interval), divided by the sampling
    step, estimates the exponent. ``mean_period_steps=None`` estimates the
    separation window from the dominant spectral peak.
    """
    pts = series.points
    n = len(pts)
    if horizon_steps < 1:
        raise ValueError("horizon_steps must be >= 1")
    if n < 10 * horizon_steps:
        raise ValueError(f"series length {n} below 10 * horizon_steps = {10 * horizon_steps}")
    theiler = dominant_period_steps(series) if mean_period_steps is None else int(mean_period_steps)
    lo, hi = int(fit_range[0]), int(fit_range[1])
    if not 0 <= lo < hi <= horizon_steps:
        raise ValueError(f"fit_range {fit_range} must lie inside [0, horizon_steps]")

    n_vec = n - horizon_steps
    n_refs = min(sample_cap, n_vec)
    refs = np.unique(np.linspace(0, n_vec - 1, n_refs).astype(int))
    base = pts[:n_vec]

    neighbors = np.empty(len(refs), dtype=int)
    has_neighbor = np.zeros(len(refs), dtype=bool)
    for start in range(0, len(refs), _CHUNK):
        block = refs[start : start + _CHUNK]
        dists = cdist(pts[block], base)
        for row, i in enumerate(block):
            dists[row, max(0, i - theiler) : i + theiler + 1] = np.inf
        finite = np.isfinite(dists).any(axis=1)
        neighbors[start : start + len(block)] = np.argmin(dists, axis=1)
        has_neighbor[start : start + len(block)] = finite

    refs = refs[has_neighbor]
    neighbors = neighbors[has_neighbor]
    if len(refs) < 10:
        raise ValueError(f"only {len(refs)} valid neighbor pairs; need at least 10")

    mean_log_div = np.full(horizon_steps + 1, -np.inf)
    for k in range(horizon_steps + 1):
        d_k = np.linalg.norm(pts[refs + k] - pts[neighbors + k], axis=1)
        nonzero = d_k > 0
        if nonzero.any():
            mean_log_div[k] = float(np.mean(np.log(d_k[nonzero])))

    ks = np.arange(horizon_steps + 1)
    window = (ks >= lo) & (ks <= hi) & np.isfinite(mean_log_div)
    if window.sum() < 2:
        raise ValueError("divergence curve has no usable points in the fit range")
    slope = np.polyfit(ks[window].astype(float), mean_log_div[window], 1)[0]
    return float(slope / series.dt)


def correlation_dimension(
    series: TimeSeries,
    r_grid: np.ndarray | None = None,
    fit_range: tuple[float, float] | None = None,
    theiler: int = 0,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
) -> float:
    """Correlation dimension from the scaling of the correlation integral.

    Counts state pairs closer than each radius (excluding pairs within the
    Theiler window) on a deterministic subsample of at most ``sample_cap``
    points, then fits the log-log slope of the pair fraction against the
    radius over ``fit_range``. Defaults: 24 radii log-spaced over
    [0.01, 1] x attractor diameter, fitted over the central decade.
    """
    pts = series.points
    n = len(pts)
    if n < 1000:
        raise ValueError(f"series length {n} below the 1000-point minimum")
    if n > sample_cap:
        idx = np.unique(np.linspace(0, n - 1, sample_cap).astype(int))
    else:
        idx = np.arange(n)
    sub = pts[idx]
    diameter = float(np.linalg.norm(sub.max(axis=0) - sub.min(axis=0)))
    if diameter == 0:
        raise ValueError("degenerate series: zero spatial extent")
    if r_grid is None:
        r_grid = np.geomspace(0.01, 1.0, 24) * diameter
    else:
        r_grid = np.asarray(r_grid, dtype=float)
    if fit_range is None:
        fit_range = (10**-1.5 * diameter, 10**-0.5 * diameter)

    edges = np.concatenate([[0.0], r_grid])
    counts = np.zeros(len(r_grid), dtype=np.int64)
    n_pairs = 0
    for start in range(0, len(idx), _CHUNK):
        block = slice(start, min(start + _CHUNK, len(idx)))
        dists = cdist(sub[block], sub)
        for row, orig_i in enumerate(idx[block]):
            first = int(np.searchsorted(idx, orig_i + theiler, side="right"))
            valid = dists[row, first:]
            n_pairs += valid.size
            hist, _ = np.histogram(valid, bins=edges)
            counts += np.cumsum(hist)
    if n_pairs == 0:
        raise ValueError("no pairs outside the Theiler window")

    corr_sum = counts / n_pairs
    window = (r_grid >= fit_range[0]) & (r_grid <= fit_range[1]) & (corr_sum > 0)
    if window.sum() < 2:
        raise ValueError("correlation sums are empty across the fit range")
    slope = np.polyfit(np.log(r_grid[window]), np.log(corr_sum[window]), 1)[0]
    return float(slope)
