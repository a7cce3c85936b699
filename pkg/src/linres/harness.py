"""Experiment orchestration: the full architecture x noise-level x seed grid.

Protocol per run: integrate the Lorenz system, normalize with
training-split statistics, add seeded observation noise, teacher-force
the reservoir, ridge-fit the readout on post-washout pairs, then run a
fully autonomous forecast over the test horizon and score it against the
clean normalized test trajectory.
"""

from __future__ import annotations

import json
import sys as _sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

if _sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from linres.dynamics import (
    LorenzParams,
    NoiseModel,
    add_noise,
    apply_normalizer,
    fit_normalizer,
    generate_trajectory,
)
from linres.forecast import ForecastResult, evaluate_forecast
from linres.readout import RegressionProblem, ridge_fit
from linres.reservoir import ReservoirSystem, build_random, build_takens, drive
from linres.rng import derive_seed

ARCHITECTURES = ("random", "takens")

# Reference results for this protocol from prior published experiments,
# reported alongside ours for inspection; never asserted against.
REFERENCE_RESULTS = {
    ("random", 0.0): {"mse": 0.0023, "valid_time": 1847},
    ("random", 0.01): {"mse": 0.0089, "valid_time": 1235},
    ("random", 0.1): {"mse": 0.0834, "valid_time": 428},
    ("takens", 0.0): {"mse": 0.0019, "valid_time": 1923},
    ("takens", 0.01): {"mse": 0.0071, "valid_time": 1456},
    ("takens", 0.1): {"mse": 0.0692, "valid_time": 573},
}


class ConfigError(ValueError):
    """Invalid or unparsable experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    lorenz: LorenzParams = LorenzParams()
    dt: float = 0.01
    total_steps: int = 7000
    train_steps: int = 5000
    washout: int = 100
    test_steps: int = 2000
    n: int = 102
    d: int = 3
    target_rho: float = 0.9
    input_scale: float = 0.1
    ridge_lambda: float = 1e-6
    noise_levels: tuple = (0.0, 0.01, 0.1)
    seeds: tuple = (0, 1, 2, 3, 4)
    threshold: float = 0.5
    initial_state: tuple = (1.0, 1.0, 1.0)
    architectures: tuple = ARCHITECTURES
    output_dir: str = "results"

    def __post_init__(self):
        if not self.washout < self.train_steps:
            raise ConfigError("washout must be smaller than train_steps")
        if self.train_steps + self.test_steps > self.total_steps:
            raise ConfigError("train_steps + test_steps must not exceed total_steps")
        if not self.threshold > 0:
            raise ConfigError("threshold must be positive")
        if any(s < 0 for s in self.noise_levels):
            raise ConfigError("noise_levels must be nonnegative")
        if any(a not in ARCHITECTURES for a in self.architectures):
            raise ConfigError(f"architectures must be among {ARCHITECTURES}")


@dataclass(frozen=True)
class RunRecord:
    architecture: str
    sigma: float
    seed: int
    mse: float
    valid_time: int
    diverged_at: int | None
    rmse_series_path: str | None = None
    predictions_path: str | None = None


_CONFIG_KEYS = {
    "lorenz_sigma",
    "lorenz_rho",
    "lorenz_beta",
    "dt",
    "total_steps",
    "train_steps",
    "washout",
    "test_steps",
    "reservoir_size",
    "target_rho",
    "input_scale",
    "ridge_lambda",
    "noise_levels",
    "seeds",
    "threshold",
    "initial_state",
    "architectures",
    "output_dir",
}


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat TOML config; every key optional, defaults as above."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    lorenz = LorenzParams(
        sigma=raw.get("lorenz_sigma", 10.0),
        rho=raw.get("lorenz_rho", 28.0),
        beta=raw.get("lorenz_beta", 8.0 / 3.0),
    )
    kwargs = {"lorenz": lorenz}
    for toml_key, attr in [
        ("dt", "dt"),
        ("total_steps", "total_steps"),
        ("train_steps", "train_steps"),
        ("washout", "washout"),
        ("test_steps", "test_steps"),
        ("reservoir_size", "n"),
        ("target_rho", "target_rho"),
        ("input_scale", "input_scale"),
        ("ridge_lambda", "ridge_lambda"),
        ("threshold", "threshold"),
        ("output_dir", "output_dir"),
    ]:
        if toml_key in raw:
            kwargs[attr] = raw[toml_key]
    for toml_key, attr in [
        ("noise_levels", "noise_levels"),
        ("seeds", "seeds"),
        ("initial_state", "initial_state"),
        ("architectures", "architectures"),
    ]:
        if toml_key in raw:
            kwargs[attr] = tuple(raw[toml_key])
    return ExperimentConfig(**kwargs)


def _single_run(
    cfg: ExperimentConfig,
    sys: ReservoirSystem,
    noisy: np.ndarray,
    clean_test: np.ndarray,
) -> ForecastResult:
    """Train on noisy observations, then free-run over the test horizon."""
    train_inputs = noisy[: cfg.train_steps]
    states = drive(sys, np.zeros(sys.n), train_inputs)
    # Pairs (state_t, obs_{t+1}); the first `washout` pairs are discarded.
    prob = RegressionProblem(
        x=states[cfg.washout : cfg.train_steps - 1],
        y=train_inputs[cfg.washout + 1 : cfg.train_steps],
    )
    weights = ridge_fit(prob, cfg.ridge_lambda)
    return evaluate_forecast(sys, weights, states[-1], clean_test, cfg.threshold)


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> list[RunRecord]:
    """Execute the full grid; deterministic for a fixed config.

    When out_dir is given, per-run prediction CSVs are written as a side
    effect and referenced from the returned records.
    """
    traj = generate_trajectory(
        cfg.lorenz, np.array(cfg.initial_state), cfg.dt, cfg.total_steps
    )
    norm = fit_normalizer(traj.data[: cfg.train_steps])
    normalized = apply_normalizer(norm, traj.data)
    clean_test = normalized[cfg.train_steps : cfg.train_steps + cfg.test_steps]

    records = []
    for seed in cfg.seeds:
        reservoirs = {}
        for arch in cfg.architectures:
            if arch == "random":
                reservoirs[arch] = build_random(
                    cfg.n, cfg.d, cfg.target_rho, cfg.input_scale,
                    derive_seed(seed, "reservoir"),
                )
            else:
                reservoirs[arch] = build_takens(cfg.n, cfg.d)
        for sigma in cfg.noise_levels:
            # Same seed -> same noise stream for both architectures
            # (paired comparison); sigma only scales it.
            noisy = add_noise(
                normalized, NoiseModel(sigma=sigma, seed=derive_seed(seed, "noise"))
            )
            for arch in cfg.architectures:
                try:
                    result = _single_run(cfg, reservoirs[arch], noisy, clean_test)
                except Exception as exc:
                    raise RuntimeError(
                        f"run failed (arch={arch}, sigma={sigma}, seed={seed}): {exc}"
                    ) from exc
                pred_path = None
                if out_dir is not None:
                    pred_path = _write_prediction_csv(
                        Path(out_dir), arch, sigma, seed, result, clean_test
                    )
                records.append(
                    RunRecord(
                        architecture=arch,
                        sigma=sigma,
                        seed=seed,
                        mse=result.mse,
                        valid_time=result.valid_time,
                        diverged_at=result.diverged_at,
                        rmse_series_path=pred_path,
                        predictions_path=pred_path,
                    )
                )
    return records


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _sigma_label(sigma: float) -> str:
    return format(float(sigma), "g")


def _write_prediction_csv(
    out_dir: Path,
    arch: str,
    sigma: float,
    seed: int,
    result: ForecastResult,
    truth: np.ndarray,
) -> str:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"pred_{arch}_{_sigma_label(sigma)}_{seed}.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write("step,true_x,true_y,true_z,pred_x,pred_y,pred_z,rmse\n")
        for t in range(truth.shape[0]):
            row = [str(t)]
            row += [_fmt(v) for v in truth[t]]
            row += [_fmt(v) for v in result.predictions[t]]
            row.append(_fmt(result.rmse_series[t]))
            fh.write(",".join(row) + "\n")
    return str(path)


def summarize(records: list[RunRecord], cfg: ExperimentConfig) -> dict:
    """Median-aggregated grid plus the reference comparison."""
    grid = {}
    for arch in cfg.architectures:
        for sigma in cfg.noise_levels:
            cell = [r for r in records if r.architecture == arch and r.sigma == sigma]
            if not cell:
                continue
            ref = REFERENCE_RESULTS.get((arch, float(sigma)))
            grid[f"{arch}_{_sigma_label(sigma)}"] = {
                "architecture": arch,
                "sigma": sigma,
                "median_mse": float(np.median([r.mse for r in cell])),
                "median_valid_time": float(np.median([r.valid_time for r in cell])),
                "mse": [r.mse for r in cell],
                "valid_time": [r.valid_time for r in cell],
                "seeds": [r.seed for r in cell],
                "reference_mse": ref["mse"] if ref else None,
                "reference_valid_time": ref["valid_time"] if ref else None,
            }
    return {
        "config": {
            "dt": cfg.dt,
            "total_steps": cfg.total_steps,
            "train_steps": cfg.train_steps,
            "washout": cfg.washout,
            "test_steps": cfg.test_steps,
            "reservoir_size": cfg.n,
            "target_rho": cfg.target_rho,
            "input_scale": cfg.input_scale,
            "ridge_lambda": cfg.ridge_lambda,
            "threshold": cfg.threshold,
            "noise_levels": list(cfg.noise_levels),
            "seeds": list(cfg.seeds),
            "architectures": list(cfg.architectures),
        },
        "grid": grid,
    }


def emit_results(records: list[RunRecord], cfg: ExperimentConfig, out_dir: str | Path) -> list[str]:
    """Write summary.json and metrics.csv; returns the written paths."""
    if not records:
        raise ValueError("no run records to emit")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    metrics_path = out_dir / "metrics.csv"
    with open(metrics_path, "w", newline="\n") as fh:
        fh.write("architecture,sigma,seed,mse,valid_time\n")
        for r in records:
            fh.write(
                f"{r.architecture},{_fmt(r.sigma)},{r.seed},{_fmt(r.mse)},{r.valid_time}\n"
            )
    written.append(str(metrics_path))

    summary_path = out_dir / "summary.json"
    with open(summary_path, "w", newline="\n") as fh:
        json.dump(summarize(records, cfg), fh, indent=2)
        fh.write("\n")
    written.append(str(summary_path))
    return written
