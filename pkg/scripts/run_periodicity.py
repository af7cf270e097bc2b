"""
Script to classify every problem document in a directory
"""

import json
import os
import sys
from pathlib import Path

# Add current directory to path to allow imports from core, spectral, etc.
sys.path.append(os.getcwd())

import structlog

from cli.commands import cmd_classify
from core.config import settings
from core.exceptions import SpectralException
from core.logging import setup_logging
from services.problem_service import build_problem, load_config
from services.report_service import ReportWriter

logger = structlog.get_logger(__name__)


def run_periodicity(config_dir: str, output_dir: str) -> int:
    """Classify each *.json in config_dir; returns the number of failures."""
    documents = sorted(Path(config_dir).glob("*.json"))
    if not documents:
        logger.warning("no_problem_documents", directory=config_dir)
        return 0

    failures = 0
    summary = {}
    for path in documents:
        try:
            config = load_config(str(path))
            problem = build_problem(config)
            writer = ReportWriter(str(Path(output_dir) / path.stem), config.model_dump(mode="json"), "classify")
            verdict = cmd_classify(problem, writer)
            summary[path.stem] = verdict["kind"]
            logger.info("problem_classified", problem=path.stem, kind=verdict["kind"])
        except SpectralException as e:
            failures += 1
            summary[path.stem] = e.__class__.__name__
            logger.error("problem_failed", problem=path.stem, error=str(e))
            continue

    print(json.dumps(summary, indent=2))
    logger.info("all_problems_processed", total=len(documents), failures=failures)
    return failures


if __name__ == "__main__":
    setup_logging()
    directory = sys.argv[1] if len(sys.argv) > 1 else "problems"
    target = sys.argv[2] if len(sys.argv) > 2 else settings.OUTPUT_DIR
    sys.exit(1 if run_periodicity(directory, target) else 0)
