"""Command line front end: `plots render spec.json`."""

import argparse
import json
import sys

from .figure import FigureSpec, render


def _build_parser():
    p = argparse.ArgumentParser(prog="plots", description="Figure rendering for harness CSVs")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure from a JSON spec")
    r.add_argument("spec", help="path to a figure spec JSON file")
    return p


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        sidecar = render(FigureSpec.from_json(args.spec))
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    slope = sidecar.get("slope")
    note = f" slope={slope:.4f}" if slope is not None else ""
    print(f"wrote {sidecar['n_points']} points{note}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
