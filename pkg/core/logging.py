"""
Logging configuration
"""

import logging
import sys

import structlog

from core.config import settings

_CONFIGURED = False


def setup_logging(level: str = None, fmt: str = None) -> None:
    """Configure stdlib logging and route structlog events through it"""
    global _CONFIGURED

    level_name = (level or settings.LOG_LEVEL).upper()
    log_level = getattr(logging, level_name, logging.INFO)
    renderer_name = (fmt or settings.LOG_FORMAT).lower()

    # stdout carries JSON results, so log records go to stderr
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )

    renderer = (
        structlog.processors.JSONRenderer()
        if renderer_name == "json"
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.format_exc_info,
            renderer,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    # Matrix libraries are chatty at DEBUG
    logging.getLogger("numpy").setLevel(logging.WARNING)
    logging.getLogger("scipy").setLevel(logging.WARNING)

    if not _CONFIGURED:
        logger = structlog.get_logger(__name__)
        logger.info("logging_configured", level=level_name, format=renderer_name, environment=settings.ENVIRONMENT)
    _CONFIGURED = True
