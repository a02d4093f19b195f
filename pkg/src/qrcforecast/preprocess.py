"""Standardize-then-rescale preprocessing for reservoir inputs.

The forward map per dimension is ``z = (x - mean) / std`` followed by a
linear squeeze of the standardized training range onto a target interval
``[a, b]`` inside [0, 1], then a clamp to [0, 1]. Training data lands in
``[a, b]`` exactly; only out-of-sample points can hit the clamp. The clamp
bound is [0, 1] rather than [a, b] because the amplitude encoding only
requires [0, 1] and tighter clamping would discard legitimate excursions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .chaos import TimeSeries


@dataclass
class Scaler:
    mean: np.ndarray
    std: np.ndarray
    lo: np.ndarray  # per-dimension min of the standardized training data
    hi: np.ndarray  # per-dimension max of the standardized training data
    a: float
    b: float

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float)
        self.std = np.asarray(self.std, dtype=float)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if np.any(self.std <= 0):
            raise ValueError("standard deviation must be positive in every dimension")
        if np.any(self.hi <= self.lo):
            raise ValueError("standardized range collapsed (min >= max)")
        if not (0.0 <= self.a < self.b <= 1.0):
            raise ValueError(f"need 0 <= a < b <= 1, got a={self.a}, b={self.b}")

    @property
    def dim(self) -> int:
        return self.mean.size

    def transform_array(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        z = (points - self.mean) / self.std
        y = self.a + (self.b - self.a) * (z - self.lo) / (self.hi - self.lo)
        return np.clip(y, 0.0, 1.0)

    def inverse_array(self, points: np.ndarray) -> np.ndarray:
        y = np.asarray(points, dtype=float)
        z = self.lo + (y - self.a) * (self.hi - self.lo) / (self.b - self.a)
        return self.mean + self.std * z

    def transform(self, series: TimeSeries) -> TimeSeries:
        self._check_dim(series)
        return TimeSeries(self.transform_array(series.points), series.dt, kind="scaled")

    def inverse_transform(self, series: TimeSeries) -> TimeSeries:
        """Exact algebraic inverse of the unclamped forward map."""
        self._check_dim(series)
        return TimeSeries(self.inverse_array(series.points), series.dt, kind="raw")

    def _check_dim(self, series: TimeSeries) -> None:
        if series.dim != self.dim:
            raise ValueError(f"scaler fitted on dim {self.dim}, series has dim {series.dim}")

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "lo": self.lo.tolist(),
            "hi": self.hi.tolist(),
            "a": self.a,
            "b": self.b,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(d["mean"], d["std"], d["lo"], d["hi"], d["a"], d["b"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Scaler":
        return cls.from_dict(json.loads(text))


def fit_scaler(train, a: float, b: float) -> Scaler:
    """Fit the standardize+rescale transform on training points.

    ``train`` is a TimeSeries or an (n, d) array with at least two points.
    Rejects constant dimensions (zero standard deviation).
    """
    points = train.points if isinstance(train, TimeSeries) else np.atleast_2d(np.asarray(train, dtype=float))
    if len(points) < 2:
        raise ValueError("need at least two training points to fit a scaler")
    mean = points.mean(axis=0)
    std = points.std(axis=0)
    if np.any(std == 0):
        bad = np.nonzero(std == 0)[0].tolist()
        raise ValueError(f"constant training dimension(s) {bad}: cannot standardize")
    z = (points - mean) / std
    return Scaler(mean, std, z.min(axis=0), z.max(axis=0), float(a), float(b))
