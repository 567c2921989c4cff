"""Batch figure driver: one command renders one figure id (or all of them)."""

import argparse
import os
import sys

from .recipes import RECIPES, render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="gpefigs",
        description="Render publication figures from ptvortex data products")
    parser.add_argument("--data", required=True, help="data directory (solver outputs)")
    parser.add_argument("--out", default="figs", help="output directory for images")
    parser.add_argument("--fig", action="append", default=[],
                        help="figure id (F1..F8), repeatable; default: all")
    parser.add_argument("--format", default="png", choices=("png", "svg", "pdf"))
    args = parser.parse_args(argv)

    ids = [f.upper() for f in args.fig] or sorted(RECIPES)
    unknown = [f for f in ids if f not in RECIPES]
    if unknown:
        print(f"error: unknown figure ids {unknown}", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    for figure_id in ids:
        out_path = os.path.join(args.out, f"{figure_id}.{args.format}")
        try:
            render(figure_id, args.data, out_path)
        except (FileNotFoundError, ValueError) as exc:
            print(f"error: {figure_id}: {exc}", file=sys.stderr)
            return 1
        print(f"{figure_id} -> {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
