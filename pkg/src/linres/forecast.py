"""Autonomous (free-running) forecasting and forecast-quality metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from linres.readout import ReadoutWeights
from linres.reservoir import ReservoirSystem

CLAMP = 1e6


@dataclass(frozen=True)
class ForecastResult:
    predictions: np.ndarray  # (H, d), normalized units
    rmse_series: np.ndarray  # (H,)
    mse: float
    valid_time: int
    diverged_at: Optional[int] = None  # first clamped step, if any

    def __post_init__(self):
        if self.valid_time > self.predictions.shape[0]:
            raise ValueError("valid_time cannot exceed the horizon")
        if self.mse < 0 or np.any(self.rmse_series < 0):
            raise ValueError("error metrics must be nonnegative")


def autonomous_forecast(
    sys: ReservoirSystem,
    weights: ReadoutWeights,
    x_seed: np.ndarray,
    horizon: int,
) -> np.ndarray:
    """Closed-loop prediction: each output is fed back as the next input.

    Step 0 predicts from x_seed (the last teacher-forced state).
    Components beyond +-CLAMP are clamped so a diverging linear loop
    still yields finite, comparable metrics.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    x = np.asarray(x_seed, dtype=float)
    preds = np.empty((horizon, sys.d))
    for t in range(horizon):
        y = weights.w.T @ x
        y = np.clip(np.nan_to_num(y, nan=CLAMP, posinf=CLAMP, neginf=-CLAMP), -CLAMP, CLAMP)
        preds[t] = y
        if t + 1 < horizon:
            x = sys.a @ x + sys.c @ y
    return preds


def mse(pred: np.ndarray, truth: np.ndarray) -> float:
    """Mean over time of the squared Euclidean row error."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError("prediction and truth shapes must match")
    return float(np.mean(np.sum((pred - truth) ** 2, axis=1)))


def rmse_series(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Per-step RMSE, averaged over dimensions inside the root."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError("prediction and truth shapes must match")
    return np.sqrt(np.mean((pred - truth) ** 2, axis=1))


def valid_time(rmse: np.ndarray, threshold: float) -> int:
    """Steps until the per-step RMSE first strictly exceeds the threshold."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    exceeded = np.nonzero(rmse > threshold)[0]
    return int(exceeded[0]) if exceeded.size else len(rmse)


def evaluate_forecast(
    sys: ReservoirSystem,
    weights: ReadoutWeights,
    x_seed: np.ndarray,
    truth: np.ndarray,
    threshold: float,
) -> ForecastResult:
    """Run the autonomous loop over len(truth) steps and score it."""
    preds = autonomous_forecast(sys, weights, x_seed, truth.shape[0])
    clamped = np.nonzero(np.any(np.abs(preds) >= CLAMP, axis=1))[0]
    series = rmse_series(preds, truth)
    return ForecastResult(
        predictions=preds,
        rmse_series=series,
        mse=mse(preds, truth),
        valid_time=valid_time(series, threshold),
        diverged_at=int(clamped[0]) if clamped.size else None,
    )
