"""
Command-line entry point.

    python -m cli.main <command> --config problem.json [--set key=value ...] [--output-dir DIR]

Exit codes: 0 success, 2 malformed configuration, 3 ill-posed problem,
4 numerical failure. Errors are printed on stderr as JSON.
"""

import argparse
import json
import sys
from typing import List, Optional

import structlog

from cli.commands import COMMANDS, FILE_COMMANDS
from core.config import settings
from core.exceptions import SpectralException
from core.logging import setup_logging
from services.problem_service import build_problem, load_config
from services.report_service import ReportWriter, dumps

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="periodicity",
        description="Periodicity of linear dispersive PDEs on [0, 1] with time-periodic boundary data.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    help_text = {
        "classify": "Periodicity verdict with evidence (JSON on stdout)",
        "dtn": "Recovered boundary coefficients per mode",
        "construct": "u_T samples and the u_1 manifest",
        "simulate": "Reference time stepping with diagnostics",
        "delta-map": "sin(arg Delta) heatmap and located zeros",
        "verify": "Compare u_1 + u_2 with the reference solver",
    }
    for name in COMMANDS:
        sub = subparsers.add_parser(name, help=help_text[name])
        sub.add_argument("--config", type=str, default=None, help="Problem document (JSON).")
        sub.add_argument(
            "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
            help="Override a dotted config path; VALUE is parsed as JSON when possible.",
        )
        sub.add_argument("--output-dir", dest="output_dir", type=str, default=None,
                         help=f"Artefact directory (default for file commands: {settings.OUTPUT_DIR}).")
        sub.add_argument("--log-level", dest="log_level", type=str, default=None, help="Logging level.")
        sub.add_argument("--log-format", dest="log_format", choices=["console", "json"], default=None,
                         help="Log renderer.")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level, fmt=args.log_format)
    try:
        config = load_config(args.config, args.overrides)
        problem = build_problem(config)
        output_dir = args.output_dir
        if output_dir is None and args.command in FILE_COMMANDS:
            output_dir = settings.OUTPUT_DIR
        writer = None
        if output_dir is not None:
            writer = ReportWriter(output_dir, config.model_dump(mode="json"), args.command)
        payload = COMMANDS[args.command](problem, writer)
    except SpectralException as e:
        logger.error("command_failed", command=args.command, error=e.__class__.__name__, message=e.message)
        print(json.dumps(e.to_dict(), indent=2), file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception("command_crashed", command=args.command)
        print(json.dumps({"error_type": type(e).__name__, "message": str(e), "exit_code": EXIT_UNEXPECTED}),
              file=sys.stderr)
        return EXIT_UNEXPECTED
    print(dumps(payload))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
