"""Standalone plotting script over simulator output directories."""

from __future__ import annotations

import argparse
import sys

from .figures import CASE_ORDER, jobs_from_run_root, plot_case, plot_grid
from .series import SeriesError


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="littplot",
        description="Render probe-temperature comparison figures from "
                    "simulator timeseries.csv files")
    parser.add_argument("--root", default="runs",
                        help="output root containing <case>_<model>/ runs")
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--case", help="render one case comparison panel")
    mode.add_argument("--grid", action="store_true",
                      help="render the 3x3 grid of all nine cases")
    parser.add_argument("--diff", action="store_true",
                        help="plot pairwise model differences instead of curves")
    parser.add_argument("--measured", default=None,
                        help="optional digitized measurement CSV (t_s,T_C)")
    parser.add_argument("--out", default=None,
                        help="output image (.svg or .png)")
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.grid:
            output = args.out or "grid.svg"
            jobs = jobs_from_run_root(args.root, CASE_ORDER, output,
                                      measured=args.measured)
            plot_grid(jobs, output, diff=args.diff)
        else:
            output = args.out or f"{args.case}.svg"
            job = jobs_from_run_root(args.root, [args.case], output,
                                     measured=args.measured)[0]
            plot_case(job, diff=args.diff)
    except (SeriesError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(output)
    return 0


def entry():
    sys.exit(main())
