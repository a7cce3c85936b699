"""Render the prediction-grid and metric-bar figures from harness outputs.

Read-only consumer of an experiment output directory: summary.json plus
the per-run pred_<arch>_<sigma>_<seed>.csv files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

TRACE_WINDOW = 500
COLORS = {"random": "tab:blue", "takens": "tab:orange"}


class InputDataError(RuntimeError):
    """Missing or ill-formed harness output, with the offending path."""


@dataclass(frozen=True)
class FigureSpec:
    input_dir: Path
    output_dir: Path
    formats: tuple = ("png",)

    def __post_init__(self):
        object.__setattr__(self, "input_dir", Path(self.input_dir))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        for fmt in self.formats:
            if fmt not in ("png", "svg"):
                raise ValueError(f"unsupported format: {fmt}")


def load_summary(input_dir: Path) -> dict:
    path = Path(input_dir) / "summary.json"
    if not path.exists():
        raise InputDataError(f"missing input file: {path}")
    try:
        with open(path) as fh:
            summary = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputDataError(f"cannot parse {path}: {exc}")
    if "grid" not in summary or "config" not in summary:
        raise InputDataError(f"{path} lacks the expected grid/config structure")
    return summary


def median_seed(cell: dict) -> int:
    """Seed of the run whose MSE is the (lower) median of its cell."""
    order = np.argsort(cell["mse"])
    return cell["seeds"][order[(len(order) - 1) // 2]]


def _sigma_label(sigma: float) -> str:
    return format(float(sigma), "g")


def load_prediction_csv(input_dir: Path, arch: str, sigma: float, seed: int) -> dict:
    path = Path(input_dir) / f"pred_{arch}_{_sigma_label(sigma)}_{seed}.csv"
    if not path.exists():
        raise InputDataError(f"missing input file: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    expected = {"step", "true_x", "true_y", "true_z", "pred_x", "pred_y", "pred_z", "rmse"}
    if data.dtype.names is None or set(data.dtype.names) != expected:
        raise InputDataError(f"unexpected columns in {path}")
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def build_predictions_figure(summary: dict, input_dir: Path) -> plt.Figure:
    """3 x n_sigma grid: X trace, X-Z phase projection, log-scale RMSE.

    Traces show the median-MSE seed per cell over the first 500 steps.
    """
    config = summary["config"]
    sigmas = config["noise_levels"]
    archs = config["architectures"]
    fig, axes = plt.subplots(3, len(sigmas), figsize=(5 * len(sigmas), 11), squeeze=False)
    for col, sigma in enumerate(sigmas):
        runs = {}
        for arch in archs:
            cell = summary["grid"][f"{arch}_{_sigma_label(sigma)}"]
            seed = median_seed(cell)
            runs[arch] = (seed, load_prediction_csv(input_dir, arch, sigma, seed))

        ax = axes[0, col]
        first = next(iter(runs.values()))[1]
        w = min(TRACE_WINDOW, len(first["step"]))
        ax.plot(first["step"][:w], first["true_x"][:w], "k-", lw=1, label="true")
        for arch, (seed, run) in runs.items():
            ax.plot(run["step"][:w], run["pred_x"][:w], color=COLORS[arch], lw=1,
                    label=f"{arch} (seed {seed})")
        ax.set_title(f"noise sigma = {_sigma_label(sigma)}")
        ax.set_xlabel("step")
        ax.set_ylabel("x (normalized)")
        ax.set_ylim(-4, 4)
        if col == 0:
            ax.legend(fontsize=8)

        ax = axes[1, col]
        ax.plot(first["true_x"], first["true_z"], "k-", lw=0.5, alpha=0.6, label="true")
        for arch, (seed, run) in runs.items():
            ax.plot(run["pred_x"], run["pred_z"], color=COLORS[arch], lw=0.5, alpha=0.8,
                    label=arch)
        ax.set_xlabel("x (normalized)")
        ax.set_ylabel("z (normalized)")
        ax.set_xlim(-4, 4)
        ax.set_ylim(-4, 4)
        if col == 0:
            ax.legend(fontsize=8)

        ax = axes[2, col]
        for arch, (seed, run) in runs.items():
            ax.semilogy(run["step"], np.maximum(run["rmse"], 1e-18), color=COLORS[arch],
                        lw=0.8, label=arch)
        ax.axhline(config.get("threshold", 0.5), color="gray", ls="--", lw=0.8)
        ax.set_xlabel("step")
        ax.set_ylabel("RMSE (log)")
        if col == 0:
            ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def build_metrics_figure(summary: dict) -> plt.Figure:
    """Grouped bars: median MSE and median valid time per architecture."""
    config = summary["config"]
    sigmas = config["noise_levels"]
    archs = config["architectures"]
    fig, (ax_mse, ax_vt) = plt.subplots(1, 2, figsize=(10, 4.5))
    x = np.arange(len(sigmas))
    width = 0.8 / len(archs)
    for i, arch in enumerate(archs):
        cells = [summary["grid"][f"{arch}_{_sigma_label(s)}"] for s in sigmas]
        offset = (i - (len(archs) - 1) / 2) * width
        ax_mse.bar(x + offset, [c["median_mse"] for c in cells], width,
                   color=COLORS[arch], label=arch)
        ax_vt.bar(x + offset, [c["median_valid_time"] for c in cells], width,
                  color=COLORS[arch], label=arch)
    for ax, title in ((ax_mse, "median MSE"), (ax_vt, "median valid time (steps)")):
        ax.set_xticks(x)
        ax.set_xticklabels([_sigma_label(s) for s in sigmas])
        ax.set_xlabel("noise sigma")
        ax.set_title(title)
        ax.legend()
    fig.tight_layout()
    return fig


def render_figures(spec: FigureSpec) -> list:
    """Write predictions_grid.<fmt> and metrics.<fmt>; returns the paths."""
    summary = load_summary(spec.input_dir)
    spec.output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    pred_fig = build_predictions_figure(summary, spec.input_dir)
    metrics_fig = build_metrics_figure(summary)
    try:
        for fmt in spec.formats:
            for name, fig in (("predictions_grid", pred_fig), ("metrics", metrics_fig)):
                path = spec.output_dir / f"{name}.{fmt}"
                fig.savefig(path, dpi=120)
                written.append(path)
    finally:
        plt.close(pred_fig)
        plt.close(metrics_fig)
    return written
