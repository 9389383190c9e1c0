"""Command-line figure rendering: ``rvd-plots KIND --log simlog.csv ...``.

``KIND`` is one of the figure kinds or ``all``; with ``all`` the output
argument names a directory and one image per kind is written into it.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, render
from .logdata import MissingColumnError


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rvd-plots",
        description="Render figures from rendezvous simulation logs.")
    parser.add_argument("kind", choices=sorted(FIGURE_KINDS) + ["all"],
                        help="figure kind to render")
    parser.add_argument("--log", required=True,
                        help="simlog.csv time series")
    parser.add_argument("--json", default=None,
                        help="simlog.json summary sidecar (optional)")
    parser.add_argument("--out", required=True,
                        help="output image path (directory for 'all')")
    parser.add_argument("--nondim", action="store_true",
                        help="plot raw nondimensional values")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    dimensional = not args.nondim
    if args.kind == "all":
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        specs = [FigureSpec(kind=k, log_path=args.log, json_path=args.json,
                            output_path=str(outdir / f"{k}.png"),
                            dimensional=dimensional)
                 for k in sorted(FIGURE_KINDS)]
    else:
        specs = [FigureSpec(kind=args.kind, log_path=args.log,
                            json_path=args.json, output_path=args.out,
                            dimensional=dimensional)]
    try:
        for spec in specs:
            path = render(spec)
            print(f"wrote {path}")
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MissingColumnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
