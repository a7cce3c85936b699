"""Command-line entry points: experiment runs and stationarity verification."""

from __future__ import annotations

import argparse
import json
import sys

import linres
from linres.harness import (
    ConfigError,
    ExperimentConfig,
    emit_results,
    load_config,
    run_experiment,
    summarize,
)
from linres.theory import verification_report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linres",
        description="Linear reservoir forecasting of the noisy Lorenz system",
    )
    parser.add_argument("--version", action="version", version=linres.__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiment grid")
    run.add_argument("--config", help="TOML config file (all keys optional)")
    run.add_argument("--out", help="output directory (overrides config)")
    run.add_argument("--seeds", type=int, help="use seeds 0..n-1")
    run.add_argument(
        "--arch", choices=["random", "takens", "both"], default=None,
        help="restrict to one architecture",
    )

    verify = sub.add_parser(
        "verify-theorem", help="verify the stationary-state decomposition numerically"
    )
    verify.add_argument("--n", type=int, default=10, help="reservoir dimension")
    verify.add_argument("--rho", type=float, default=0.9, help="target spectral radius")
    verify.add_argument("--noise-sigma", type=float, default=0.1)
    verify.add_argument("--samples", type=int, default=200000)
    verify.add_argument("--burn-in", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.out:
        overrides["output_dir"] = args.out
    if args.seeds is not None:
        overrides["seeds"] = tuple(range(args.seeds))
    if args.arch and args.arch != "both":
        overrides["architectures"] = (args.arch,)
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    records = run_experiment(cfg, out_dir=cfg.output_dir)
    emit_results(records, cfg, cfg.output_dir)
    summary = summarize(records, cfg)
    print(f"wrote {len(records)} runs to {cfg.output_dir}")
    header = f"{'architecture':>12} {'sigma':>6} {'median MSE':>12} {'median valid':>12} {'ref MSE':>9} {'ref valid':>9}"
    print(header)
    for cell in summary["grid"].values():
        ref_mse = cell["reference_mse"]
        ref_vt = cell["reference_valid_time"]
        print(
            f"{cell['architecture']:>12} {cell['sigma']:>6g} "
            f"{cell['median_mse']:>12.4g} {cell['median_valid_time']:>12g} "
            f"{ref_mse if ref_mse is not None else '-':>9} "
            f"{ref_vt if ref_vt is not None else '-':>9}"
        )
    return 0


def _cmd_verify(args) -> int:
    report = verification_report(
        n=args.n,
        rho=args.rho,
        noise_sigma=args.noise_sigma,
        n_samples=args.samples,
        burn_in=args.burn_in,
        seed=args.seed,
    )
    print(json.dumps(report, indent=2))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_verify(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
