"""
Command line entry point.

Subcommands:
    run               refine a scenario file and write its artifacts
    boundary-scan     sweep constant data over the (f2, f4) plane
    plot-regions      draw the origin regions for constant data
    verify-selection  re-check an exported selection CSV
"""

import argparse
import sys
from typing import Optional, Sequence

import orjson

from src.cli.config import ConfigurationError, load_config
from src.cli.pipelines import (
    EXIT_ERROR,
    plot_regions_pipeline,
    run_scenario,
    scan_pipeline,
    verify_selection_pipeline,
)
from src.counterexample.oracles import ConstantData
from src.glaeser.errors import GlaeserError
from src.glaeser.logging import get_logger
from src.settings import AppConfig, ScanDefaults

logger = get_logger("cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glaeser", description=AppConfig.APP_NAME)
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="refine a scenario and write artifacts")
    run.add_argument("config", help="scenario TOML file")
    run.add_argument("--out", help="output directory (overrides outputs.directory)")

    scan = commands.add_parser("boundary-scan", help="classify constant data over a (f2, f4) box")
    scan.add_argument("--f1", type=float, default=ScanDefaults.F1)
    scan.add_argument("--f3", type=float, default=ScanDefaults.F3)
    scan.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"), default=list(ScanDefaults.RANGE))
    scan.add_argument("--resolution", type=int, default=ScanDefaults.RESOLUTION)
    scan.add_argument("--out-csv")
    scan.add_argument("--out-svg")
    scan.add_argument("--workers", type=int, default=1)

    plot = commands.add_parser("plot-regions", help="draw R1..R4 and the origin fiber")
    plot.add_argument("--f", type=float, nargs=4, required=True, metavar=("F1", "F2", "F3", "F4"))
    plot.add_argument("--window", type=float, default=5.0, help="half-width of the plotted box")
    plot.add_argument("--resolution", type=int, default=17, help="engine grid points per axis")
    plot.add_argument("--out-svg", required=True)

    verify = commands.add_parser("verify-selection", help="re-check an exported selection")
    verify.add_argument("config", help="scenario TOML file the selection belongs to")
    verify.add_argument("selection", help="selection CSV written by run")
    verify.add_argument("--tol", type=float)
    return parser


def _validate_flags(args: argparse.Namespace) -> None:
    if args.command == "boundary-scan":
        if args.resolution < 16:
            raise ConfigurationError("--resolution must be at least 16")
        if args.range[0] >= args.range[1]:
            raise ConfigurationError("--range needs LO < HI")
        if args.workers < 1:
            raise ConfigurationError("--workers must be positive")
    elif args.command == "plot-regions":
        if args.window <= 0:
            raise ConfigurationError("--window must be positive")
        if args.resolution < 2:
            raise ConfigurationError("--resolution must be at least 2")
    elif args.command == "verify-selection" and args.tol is not None and args.tol < 0:
        raise ConfigurationError("--tol must be nonnegative")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        Exit code: 0 feasible / success, 1 infeasible / failed check,
        2 error or not stabilized
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else 0
    try:
        _validate_flags(args)
        if args.command == "run":
            outcome = run_scenario(load_config(args.config), args.out)
        elif args.command == "boundary-scan":
            outcome = scan_pipeline(
                args.f1, args.f3, tuple(args.range), args.resolution, args.out_csv, args.out_svg, args.workers
            )
        elif args.command == "plot-regions":
            outcome = plot_regions_pipeline(ConstantData.from_sequence(args.f), args.window, args.out_svg, args.resolution)
        else:
            outcome = verify_selection_pipeline(load_config(args.config), args.selection, args.tol)
    except GlaeserError as e:
        logger.error(f"COMMAND_FAILED | command={args.command} | error={type(e).__name__} | {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, TypeError, ValueError) as e:
        logger.error(f"COMMAND_FAILED | command={args.command} | error={type(e).__name__} | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR

    sys.stdout.write(orjson.dumps(outcome.report, option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY).decode() + "\n")
    return outcome.exit_code
