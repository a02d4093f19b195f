"""Three-dimensional chaotic flows, fixed-step RK4 integration and datasets.

Eight prototypical autonomous flows are shipped as named presets with the
usual textbook parameters (Sprott's conventions), time step and initial
state. Trajectories are generated deterministically with classic
fourth-order Runge-Kutta and can be exported/imported as CSV.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Sequence

import numpy as np

DIVERGENCE_LIMIT = 1e6


class DivergenceError(RuntimeError):
    """Raised when a trajectory leaves the integration guard box."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


@dataclass
class TimeSeries:
    """Uniformly sampled d-dimensional real trajectory."""

    points: np.ndarray  # (n, d) float64
    dt: float
    kind: Literal["raw", "scaled", "predicted"] = "raw"

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        # an empty series is legal only as a fully truncated prediction

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def slice(self, start: int, stop: int, kind: str | None = None) -> "TimeSeries":
        return TimeSeries(self.points[start:stop].copy(), self.dt, kind or self.kind)

    def to_csv(self, path) -> None:
        """Write as ``t,x,y,z`` rows with 17 significant digits."""
        if self.dim != 3:
            raise ValueError(f"CSV export expects 3-d series, got dim={self.dim}")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x", "y", "z"])
            for i, p in enumerate(self.points):
                writer.writerow([format(i * self.dt, ".17g")] + [format(v, ".17g") for v in p])

    @classmethod
    def from_csv(cls, path, kind: str = "raw") -> "TimeSeries":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["t", "x", "y", "z"]:
                raise ValueError(f"unexpected CSV header {header}")
            rows = [[float(v) for v in row] for row in reader if row]
        if len(rows) < 1:
            raise ValueError("CSV contains no data rows")
        data = np.asarray(rows)
        dt = data[1, 0] - data[0, 0] if len(rows) > 1 else 1.0
        return cls(data[:, 1:], dt, kind)


@dataclass(frozen=True)
class FlowSpec:
    """A named flow with parameters, integration step and initial state."""

    system: str
    params: dict = field(default_factory=dict)
    dt: float = 0.01
    initial_state: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.system not in FLOWS:
            raise ValueError(f"unknown system {self.system!r}; known: {sorted(FLOWS)}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        expected = FLOW_PARAM_NAMES[self.system]
        if set(self.params) != expected:
            raise ValueError(
                f"{self.system} expects parameters {sorted(expected)}, got {sorted(self.params)}"
            )

    def with_overrides(self, **kwargs) -> "FlowSpec":
        return replace(self, **kwargs)


def _lorenz63(p, s):
    x, y, z = s
    return (p["sigma"] * (y - x), x * (p["rho"] - z) - y, x * y - p["beta"] * z)


def _chen(p, s):
    x, y, z = s
    return (p["a"] * (y - x), (p["c"] - p["a"]) * x - x * z + p["c"] * y, x * y - p["b"] * z)


def _chua(p, s):
    x, y, z = s
    diode = p["b"] * x + 0.5 * (p["a"] - p["b"]) * (abs(x + 1.0) - abs(x - 1.0))
    return (p["alpha"] * (y - x + diode), x - y + z, -p["beta"] * y)


def _halvorsen(p, s):
    x, y, z = s
    a = p["a"]
    return (-a * x - 4 * y - 4 * z - y * y, -a * y - 4 * z - 4 * x - z * z, -a * z - 4 * x - 4 * y - x * x)


def _roessler(p, s):
    x, y, z = s
    return (-y - z, x + p["a"] * y, p["b"] + z * (x - p["c"]))


def _rucklidge(p, s):
    x, y, z = s
    return (-p["kappa"] * x + p["lam"] * y - y * z, x, -z + y * y)


def _thomas(p, s):
    x, y, z = s
    b = p["b"]
    return (-b * x + math.sin(y), -b * y + math.sin(z), -b * z + math.sin(x))


def _windmi(p, s):
    x, y, z = s
    return (y, z, -p["a"] * z - y + p["b"] - math.exp(x))


FLOWS: dict[str, Callable] = {
    "lorenz63": _lorenz63,
    "chen": _chen,
    "chua": _chua,
    "halvorsen": _halvorsen,
    "roessler": _roessler,
    "rucklidge": _rucklidge,
    "thomas": _thomas,
    "windmi": _windmi,
}

FLOW_PARAM_NAMES: dict[str, set] = {
    "lorenz63": {"rho", "sigma", "beta"},
    "chen": {"a", "b", "c"},
    "chua": {"alpha", "beta", "a", "b"},
    "halvorsen": {"a"},
    "roessler": {"a", "b", "c"},
    "rucklidge": {"kappa", "lam"},
    "thomas": {"b"},
    "windmi": {"a", "b"},
}

FLOW_PRESETS: dict[str, FlowSpec] = {}
for _name, _params, _dt, _x0 in [
    ("lorenz63", {"rho": 28.0, "sigma": 10.0, "beta": 8.0 / 3.0}, 0.02, (0.0, -0.01, 9.0)),
    ("chen", {"a": 35.0, "b": 3.0, "c": 28.0}, 0.02, (-10.0, 0.0, 37.0)),
    ("chua", {"alpha": 9.0, "beta": 100.0 / 7.0, "a": 8.0 / 7.0, "b": 5.0 / 7.0}, 0.1, (0.0, 0.0, 0.6)),
    ("halvorsen", {"a": 1.27}, 0.05, (-5.0, 0.0, 0.0)),
    ("roessler", {"a": 0.2, "b": 0.2, "c": 5.7}, 0.1, (-9.0, 0.0, 0.0)),
    ("rucklidge", {"kappa": 2.0, "lam": 6.7}, 0.1, (1.0, 0.0, 4.5)),
    ("thomas", {"b": 0.18}, 0.3, (0.1, 0.0, 0.0)),
    ("windmi", {"a": 0.7, "b": 2.5}, 0.2, (0.0, 0.8, 0.0)),
]:
    FLOW_PRESETS[_name] = FlowSpec(_name, _params, _dt, _x0)


def flow_preset(system: str) -> FlowSpec:
    """Return the frozen preset for one of the eight named systems."""
    if system not in FLOW_PRESETS:
        raise ValueError(f"unknown system {system!r}; known: {sorted(FLOW_PRESETS)}")
    return FLOW_PRESETS[system]


def flow_eval(spec: FlowSpec, state) -> np.ndarray:
    """Evaluate the flow's right-hand side at a state."""
    state = np.asarray(state, dtype=float)
    if not np.all(np.isfinite(state)):
        raise ValueError(f"state is not finite: {state}")
    return np.asarray(FLOWS[spec.system](spec.params, state), dtype=float)


def rk4_step_fn(f: Callable[[np.ndarray], np.ndarray], state: np.ndarray, dt: float) -> np.ndarray:
    """One classic RK4 update of ``ds/dt = f(s)``."""
    k1 = f(state)
    k2 = f(state + 0.5 * dt * k1)
    k3 = f(state + 0.5 * dt * k2)
    k4 = f(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(spec: FlowSpec, state) -> np.ndarray:
    """One RK4 step of the named flow with the spec's dt."""
    state = np.asarray(state, dtype=float)
    rhs = FLOWS[spec.system]
    params = spec.params
    out = rk4_step_fn(lambda s: np.asarray(rhs(params, s), dtype=float), state, spec.dt)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(f"non-finite RK4 update for {spec.system} at state {state}")
    return out


def generate_dataset(spec: FlowSpec, total_steps: int, discard: int = 1000) -> TimeSeries:
    """Integrate a flow and return ``total_steps`` points after a transient.

    The trajectory starts at ``spec.initial_state``; the first ``discard``
    states are dropped so the orbit settles onto the attractor. Raises
    :class:`DivergenceError` (with the offending step index) if any
    coordinate exceeds ``DIVERGENCE_LIMIT``.
    """
    if total_steps <= 0:
        raise ValueError("total_steps must be positive")
    if discard < 0:
        raise ValueError("discard must be >= 0")
    rhs = FLOWS[spec.system]
    params = spec.params
    dt = spec.dt
    f = lambda s: np.asarray(rhs(params, s), dtype=float)  # noqa: E731

    state = np.asarray(spec.initial_state, dtype=float)
    points = np.empty((total_steps, state.size))
    kept = 0
    for step in range(discard + total_steps):
        if step >= discard:
            points[kept] = state
            kept += 1
            if kept == total_steps:
                break
        state = rk4_step_fn(f, state, dt)
        if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"{spec.system} trajectory diverged at step {step}: state {state}", step=step
            )
    return TimeSeries(points, dt, kind="raw")


def split_trajectories(
    series: TimeSeries, n_traj: int, traj_len: int, stride: int | None = None
) -> list[TimeSeries]:
    """Cut a long series into ``n_traj`` windows of ``traj_len`` points.

    Window ``i`` starts at ``i * stride``; the default stride equals
    ``traj_len`` (consecutive disjoint windows).
    """
    if n_traj < 1 or traj_len < 1:
        raise ValueError("n_traj and traj_len must be positive")
    if stride is None:
        stride = traj_len
    if stride < 1:
        raise ValueError("stride must be positive")
    required = (n_traj - 1) * stride + traj_len
    if len(series) < required:
        raise ValueError(
            f"series of length {len(series)} too short: "
            f"{n_traj} windows of {traj_len} at stride {stride} need {required} points"
        )
    return [series.slice(i * stride, i * stride + traj_len) for i in range(n_traj)]
