"""Command-line front end: run, sweep, cases, verify."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import (ConfigError, KELVIN_OFFSET, MaterialParams, RunSettings,
                     UnknownCaseError, VAPOR_MODELS, builtin_cases,
                     describe_case, get_case, load_config)
from .driver import SNAPSHOT_HEADER, TIMESERIES_HEADER, run_case, run_sensitivity
from .linsolve import SolverBreakdown
from .mesh import MeshError
from .radiative import RadiativeSolveError
from .thermal import HeatSolveError

OUTPUT_ROOT_ENV = "LITTSIM_OUTPUT_ROOT"

_EPILOG = f"""\
output files:
  timeseries.csv   {TIMESERIES_HEADER}
  fields_step*.csv {SNAPSHOT_HEADER}
  run_metadata.txt resolved configuration and audit totals

temperatures on the command line and in all files are Celsius; the
environment variable {OUTPUT_ROOT_ENV} overrides the output root when
--out is not given.
"""


def _window(text):
    try:
        lo, hi = text.split(":")
        return float(lo) + KELVIN_OFFSET, float(hi) + KELVIN_OFFSET
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected LO:HI in Celsius, got {text!r}") from None


def _windows(text):
    return [_window(part) for part in text.split(",") if part]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="litt",
        description="Laser-induced thermotherapy simulator "
                    "(axisymmetric finite elements)",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--case", required=True,
                       help="case label, e.g. P34F47 (see 'litt cases')")
        p.add_argument("--config", default=None,
                       help="configuration file (defaults otherwise)")
        p.add_argument("--out", default=None, help="output directory root")

    run = sub.add_parser("run", help="simulate one case",
                         epilog=_EPILOG,
                         formatter_class=argparse.RawDescriptionHelpFormatter)
    common(run)
    run.add_argument("--model", choices=VAPOR_MODELS, default=None,
                     help="vaporization model (default from config)")
    run.add_argument("--dt", type=float, default=None, help="time step, s")
    run.add_argument("--tcond", type=_window, default=None, metavar="LO:HI",
                     help="condensation window in Celsius (default 60:80)")

    sweep = sub.add_parser("sweep",
                           help="sensitivity runs over condensation windows")
    common(sweep)
    sweep.add_argument("--model", choices=VAPOR_MODELS, default=None)
    sweep.add_argument("--windows", type=_windows, required=True,
                       metavar="LO:HI,LO:HI",
                       help="comma-separated windows in Celsius")

    sub.add_parser("cases", help="list the built-in experiment cases")
    sub.add_parser("verify", help="run the built-in property checks")
    return parser


def _load(args):
    if args.config is not None:
        params, settings = load_config(args.config)
    else:
        params, settings = MaterialParams(), RunSettings()
    overrides = {}
    if getattr(args, "model", None) is not None:
        overrides["model"] = args.model
    if getattr(args, "dt", None) is not None:
        overrides["dt"] = args.dt
    if getattr(args, "tcond", None) is not None:
        overrides["T_cond_low"] = args.tcond[0]
        overrides["T_cond_high"] = args.tcond[1]
    if overrides:
        settings = replace(settings, **overrides)
    return params, settings


def _out_root(args, settings):
    if args.out is not None:
        return args.out
    return os.environ.get(OUTPUT_ROOT_ENV, settings.output_dir)


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "cases":
        for case in builtin_cases():
            print(describe_case(case))
        return 0

    if args.command == "verify":
        from .verify import run_all
        exit_code = 0
        for name, ok, details in run_all():
            print(f"{'PASS' if ok else 'FAIL'}: {name}")
            for detail in details:
                print(f"    {detail}")
            if not ok:
                exit_code = 1
        return exit_code

    try:
        params, settings = _load(args)
        case = get_case(args.case)
    except UnknownCaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            result = run_case(case, params, settings,
                              out_dir=_out_root(args, settings))
            print(f"{case.label} model={settings.model}: "
                  f"final probe T = {result.probe_T_c[-1]:.2f} C, "
                  f"max probe T = {result.probe_T_c.max():.2f} C")
            print(f"outputs in {result.run_dir}")
            return 0
        if args.command == "sweep":
            results = run_sensitivity(case, params, settings, args.windows,
                                      out_dir=_out_root(args, settings))
            for res, window in zip(results, args.windows):
                lo = window[0] - KELVIN_OFFSET
                hi = window[1] - KELVIN_OFFSET
                print(f"{case.label} window {lo:g}:{hi:g} C: "
                      f"final probe T = {res.probe_T_c[-1]:.2f} C")
            return 0
    except (ConfigError, MeshError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverBreakdown, RadiativeSolveError, HeatSolveError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    return 2


def entry():
    sys.exit(main())
