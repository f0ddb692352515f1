"""Command-line entry point.

    vdw-otoc <solve|otoc|fit|report> --config <path> [--out <dir>]
             [--state <n> ...] [--r2-min <f>] [--threads <k>] [--no-recompute]

Exit codes: 0 ok, 2 configuration/usage error, 3 numerical failure.
Thread count comes from --threads or the VDW_OTOC_THREADS environment
variable and must be pinned before numpy loads its BLAS, so the heavy
imports happen inside main().
"""

from __future__ import annotations

import argparse
import os
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdw-otoc",
        description="Correlator growth analysis for 1D diatomic potentials",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "diagonalize and write spectrum.csv"),
        ("otoc", "evaluate correlator series into otoc.csv"),
        ("fit", "re-run window detection/fitting on existing otoc.csv"),
        ("report", "full pipeline: solve, otoc, fit"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--out", help="override output.directory")
        cmd.add_argument("--state", type=int, action="append",
                         help="override otoc.states (repeatable)")
        cmd.add_argument("--r2-min", type=float, dest="r2_min",
                         help="override fit.r2_min")
        cmd.add_argument("--threads", type=int, help="BLAS thread count")
        if name == "otoc":
            cmd.add_argument("--no-recompute", action="store_true",
                             help="fail instead of recomputing missing solve artifacts")
    return parser


def _pin_threads(argv) -> None:
    """Fix BLAS thread count from --threads / VDW_OTOC_THREADS."""
    threads = None
    for i, arg in enumerate(argv):
        if arg == "--threads" and i + 1 < len(argv):
            threads = argv[i + 1]
        elif arg.startswith("--threads="):
            threads = arg.split("=", 1)[1]
    if threads is None:
        threads = os.environ.get("VDW_OTOC_THREADS")
    if threads is None:
        return
    for var in _THREAD_VARS:
        os.environ.setdefault(var, str(threads))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    _pin_threads(argv)
    args = _build_parser().parse_args(argv)

    from .errors import ConfigError, NoBoundStatesError, VdwOtocError
    from . import pipeline

    try:
        cfg = pipeline.load_config(args.config)
        if args.out:
            cfg["output"]["directory"] = args.out
        if args.state:
            cfg["otoc"]["states"] = sorted(set(args.state))
            cfg = pipeline.validate_config(cfg)
        if args.r2_min is not None:
            cfg["fit"]["r2_min"] = args.r2_min
            cfg = pipeline.validate_config(cfg)
    except (ConfigError, OSError) as exc:
        print(f"vdw-otoc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "solve":
            out = pipeline.run_solve(cfg)
        elif args.command == "otoc":
            try:
                out = pipeline.run_otoc(cfg, allow_recompute=not args.no_recompute)
            except FileNotFoundError as exc:
                print(
                    f"vdw-otoc: missing prerequisite {exc}; run `vdw-otoc solve` "
                    "first or drop --no-recompute",
                    file=sys.stderr,
                )
                return EXIT_CONFIG
        elif args.command == "fit":
            try:
                out = pipeline.run_fit(cfg)
            except FileNotFoundError as exc:
                print(
                    f"vdw-otoc: missing prerequisite {exc}; run `vdw-otoc otoc` first",
                    file=sys.stderr,
                )
                return EXIT_CONFIG
        else:
            out = pipeline.run_report(cfg)
    except ConfigError as exc:
        print(f"vdw-otoc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoBoundStatesError, VdwOtocError, ArithmeticError) as exc:
        print(f"vdw-otoc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
