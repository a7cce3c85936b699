"""Lorenz trajectory generation, normalization, and observation noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from linres.rng import generator


class TrajectoryBlowupError(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, step: int):
        self.step = step
        super().__init__(f"non-finite state at step {step}; reduce dt")


class DegenerateDataError(ValueError):
    """Data statistics are degenerate (constant column)."""


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0

    def __post_init__(self):
        if not (self.sigma > 0 and self.rho > 0 and self.beta > 0):
            raise ValueError("Lorenz parameters must be strictly positive")


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed observation sequence with its sampling step."""

    data: np.ndarray  # (T, d)
    dt: float

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] < 1:
            raise ValueError("trajectory data must be a non-empty T x d array")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("trajectory contains non-finite entries")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def steps(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class Normalizer:
    """Per-dimension affine map to zero mean, unit standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        if not np.all(self.std > 0):
            raise DegenerateDataError("normalizer std must be strictly positive")


@dataclass(frozen=True)
class NoiseModel:
    """Additive i.i.d. Gaussian observation noise, seeded for determinism."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("noise sigma must be nonnegative")


def lorenz_deriv(state: np.ndarray, params: LorenzParams) -> np.ndarray:
    """Right-hand side of the Lorenz equations."""
    x, y, z = state
    return np.array(
        [
            params.sigma * (y - x),
            x * (params.rho - z) - y,
            x * y - params.beta * z,
        ]
    )


def rk4_step(deriv_fn, state: np.ndarray, dt: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    k1 = deriv_fn(state)
    k2 = deriv_fn(state + 0.5 * dt * k1)
    k3 = deriv_fn(state + 0.5 * dt * k2)
    k4 = deriv_fn(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def generate_trajectory(
    params: LorenzParams, initial: np.ndarray, dt: float, steps: int
) -> Trajectory:
    """Integrate the Lorenz system; row t is the t-fold RK4 iterate of `initial`."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    initial = np.asarray(initial, dtype=float)
    deriv = lambda s: lorenz_deriv(s, params)
    data = np.empty((steps, 3))
    data[0] = initial
    state = initial
    for t in range(1, steps):
        state = rk4_step(deriv, state, dt)
        if not np.all(np.isfinite(state)):
            raise TrajectoryBlowupError(t)
        data[t] = state
    return Trajectory(data=data, dt=dt)


def fit_normalizer(data: np.ndarray) -> Normalizer:
    """Per-column mean and population standard deviation."""
    data = np.asarray(data, dtype=float)
    if data.shape[0] < 2:
        raise ValueError("need at least two rows to fit a normalizer")
    mean = data.mean(axis=0)
    std = data.std(axis=0)  # population (divide by T)
    if np.any(std <= 0):
        bad = int(np.argmin(std))
        raise DegenerateDataError(f"column {bad} is constant; cannot normalize")
    return Normalizer(mean=mean, std=std)


def apply_normalizer(norm: Normalizer, data: np.ndarray) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.shape[-1] != norm.mean.shape[0]:
        raise ValueError("dimension mismatch between data and normalizer")
    return (data - norm.mean) / norm.std


def invert_normalizer(norm: Normalizer, data: np.ndarray) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.shape[-1] != norm.mean.shape[0]:
        raise ValueError("dimension mismatch between data and normalizer")
    return data * norm.std + norm.mean


def add_noise(data: np.ndarray, model: NoiseModel) -> np.ndarray:
    """Add seeded i.i.d. N(0, sigma^2) noise to every entry.

    Pure function of (data, sigma, seed). sigma = 0 returns the input
    unchanged (a copy).
    """
    data = np.asarray(data, dtype=float)
    if model.sigma == 0:
        return data.copy()
    rng = generator(model.seed)
    return data + model.sigma * rng.standard_normal(data.shape)
