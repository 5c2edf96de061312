"""Render a figure panel from CSV artifacts.

    figkit --panel staircase --in svd_track.csv --out staircase.svg

Exit codes: 0 ok, 2 schema/usage error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .panels import PANELS, FigureSpec, render
from .schema import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(prog="figkit", description=__doc__)
    parser.add_argument("--panel", required=True, choices=PANELS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output SVG path")
    parser.add_argument("--log-x", action="store_true", default=None)
    parser.add_argument("--log-y", action="store_true", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(panel=args.panel, inputs=tuple(args.inputs),
                          output=args.out, log_x=args.log_x, log_y=args.log_y)
        render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
