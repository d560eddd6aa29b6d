"""
fluctum command line

    python -m fluctum verify scenario.json --out results/verify.csv
    python -m fluctum bounds scenario.json --jobs 4
    python -m fluctum sweep scenario.json --tolerance 1e-9

Exit codes: 0 every check passed, 1 numerical failure, 2 unreadable or
invalid scenario, 3 dimension mismatch. Failures are written to standard
error as one JSON object per line.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from pydantic import ValidationError

from fluctum.cli.handlers import CommandHandler
from fluctum.config.settings import settings
from fluctum.utils.error_handling import ErrorCodes, ErrorHandler, FluctumError
from fluctum.utils.logging_config import setup_logging

COMMANDS = {
    "verify": "check the generalized Jarzynski identity and the nonunitality bounds over the scenario grid",
    "bounds": "report every nonunitality bound and its slack, one row per channel",
    "sweep": "tabulate the correction term against its high- and low-temperature forms",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fluctum", description="Fluctuation relations for nonunital quantum channels")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("scenario", type=Path, help="Scenario JSON file")
        sub.add_argument("--out", type=Path, default=None, help="Report path (default: <scenario id>_<command>.csv)")
        sub.add_argument("--seed", type=int, default=settings.default_seed, help="Base seed for random channels and Hamiltonians")
        sub.add_argument("--jobs", type=int, default=settings.jobs, help="Grid points evaluated concurrently")
        sub.add_argument("--tolerance", type=float, default=None, help="Residual tolerance (fallback: FLUCTUM_TOL)")
        sub.add_argument("--log-level", default=None, help="Logging level (default: FLUCTUM_LOG_LEVEL or INFO)")
        sub.add_argument("--json-logs", action="store_true", default=None, help="Emit JSON log records")
    return parser


def _emit(failure: Dict[str, Any]) -> None:
    print(json.dumps(failure, default=str), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.json_logs)

    if args.seed < 0:
        _emit({"code": ErrorCodes.PARSE_ERROR, "kind": "error", "context": "arguments", "message": "--seed must be non-negative"})
        return ErrorCodes.PARSE_ERROR
    if args.jobs < 1:
        _emit({"code": ErrorCodes.PARSE_ERROR, "kind": "error", "context": "arguments", "message": "--jobs must be at least 1"})
        return ErrorCodes.PARSE_ERROR

    try:
        run_settings = settings.override_tolerance(args.tolerance)
    except ValueError as e:
        _emit({"code": ErrorCodes.PARSE_ERROR, "kind": "error", "context": "arguments", "message": str(e)})
        return ErrorCodes.PARSE_ERROR

    try:
        result = CommandHandler(run_settings).run(args.command, args.scenario, args.out, args.seed, args.jobs)
    except (FluctumError, ValidationError, json.JSONDecodeError) as e:
        failure = ErrorHandler.log_and_format_error(e, str(args.scenario))
        _emit(failure)
        return failure["code"]
    except Exception as e:
        failure = ErrorHandler.log_and_format_error(e, f"{args.command} {args.scenario}")
        _emit(failure)
        return ErrorCodes.NUMERICAL_FAILURE

    for failure in result.failures:
        _emit(failure)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
