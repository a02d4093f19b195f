"""Per-system scoring presets: reference climate values and estimator knobs.

The values ship as JSON package data so they can be inspected or replaced
without touching code; every knob is also overridable through the CLI. The
reference exponent/dimension pairs are the accepted literature values for
the eight attractors and double as the conversion factor from time to
Lyapunov times when scoring forecasts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np


@dataclass(frozen=True)
class MetricPreset:
    system: str
    lambda_max: float  # reference largest Lyapunov exponent (1/time)
    lambda_std: float
    corr_dim: float  # reference correlation dimension
    corr_dim_std: float
    theiler_steps: int  # temporal exclusion window (~ one mean orbit)
    lyap_horizon_steps: int  # divergence-tracking length
    lyap_fit_lo: int  # fit window for the divergence slope, in steps
    lyap_fit_hi: int
    cd_r_lo: float  # radius grid bounds (system units)
    cd_r_hi: float
    cd_fit_lo: float  # log-log fit window (system units)
    cd_fit_hi: float
    cd_n_radii: int = 24

    @property
    def lyap_fit_range(self) -> tuple[int, int]:
        return (self.lyap_fit_lo, self.lyap_fit_hi)

    @property
    def cd_r_grid(self) -> np.ndarray:
        return np.geomspace(self.cd_r_lo, self.cd_r_hi, self.cd_n_radii)

    @property
    def cd_fit_range(self) -> tuple[float, float]:
        return (self.cd_fit_lo, self.cd_fit_hi)

    def with_overrides(self, **kwargs) -> "MetricPreset":
        fields = {**self.__dict__, **{k: v for k, v in kwargs.items() if v is not None}}
        return MetricPreset(**fields)


def _load_raw() -> dict:
    text = resources.files("qrcforecast").joinpath("data/metric_presets.json").read_text()
    return json.loads(text)


_CACHE: dict[str, MetricPreset] = {}


def metric_preset(system: str) -> MetricPreset:
    if not _CACHE:
        for name, fields in _load_raw().items():
            _CACHE[name] = MetricPreset(system=name, **fields)
    if system not in _CACHE:
        raise ValueError(f"no metric preset for {system!r}; known: {sorted(_CACHE)}")
    return _CACHE[system]
