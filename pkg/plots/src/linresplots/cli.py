"""CLI for rendering figures from an experiment output directory."""

from __future__ import annotations

import argparse
import sys

import linresplots
from linresplots.figures import FigureSpec, InputDataError, render_figures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="linres-plots", description="Render figures from linres experiment outputs"
    )
    parser.add_argument("--version", action="version", version=linresplots.__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    render = sub.add_parser("render", help="render the prediction grid and metric bars")
    render.add_argument("--in", dest="input_dir", required=True, help="harness output directory")
    render.add_argument("--out", dest="output_dir", required=True, help="figure directory")
    render.add_argument("--fmt", default="png", help="comma-separated formats (png,svg)")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            input_dir=args.input_dir,
            output_dir=args.output_dir,
            formats=tuple(args.fmt.split(",")),
        )
        written = render_figures(spec)
    except (InputDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
