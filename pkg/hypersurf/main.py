import argparse
import logging
import sys
from typing import List, Optional

from hypersurf.commands import (
    classify,
    generate,
    hj,
    invariants,
    tower_check,
    verify_paper,
)
from hypersurf.core.config import VALID_LOG_LEVELS, VALID_OUTPUT_FORMATS, settings
from hypersurf.core.error_handling import (
    EXIT_UNEXPECTED,
    create_problem_detail,
    exit_code_for,
)
from hypersurf.core.logging import configure_logging, new_run_id

logger = logging.getLogger(__name__)

COMMANDS = (hj, tower_check, invariants, classify, generate, verify_paper)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypersurf",
        description="Exact towers of cyclic covers and hyperbolicity certificates",
    )
    parser.add_argument(
        "--output",
        choices=VALID_OUTPUT_FORMATS,
        default=None,
        help=f"report format (default: {settings.OUTPUT_FORMAT})",
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=VALID_LOG_LEVELS,
        default=None,
        help=f"diagnostics level on stderr (default: {settings.LOG_LEVEL})",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker cap for sweeps (default: HYPERSURF_THREADS or serial)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the ``hypersurf`` console script.

    Returns:
        Process exit status: 0 on success, 2 on specification problems,
        3 on internal consistency failures, 1 otherwise
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or settings.LOG_LEVEL)
    run_id = new_run_id()
    logger.info(f"Run {run_id}: {args.command}")

    if args.threads is not None and args.threads < 1:
        args.threads = None
        logger.warning("Ignoring non-positive --threads")

    try:
        return args.func(args)
    except Exception as e:
        code = exit_code_for(e)
        if code == EXIT_UNEXPECTED:
            logger.exception(f"Unexpected failure in {args.command}")
        else:
            logger.error(f"{type(e).__name__}: {e}")
        problem = create_problem_detail(e)
        sys.stderr.write(problem.model_dump_json(indent=2) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
