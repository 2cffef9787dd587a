#!/usr/bin/env python3
"""
dynmsf - Logging Setup
======================

Copyright (c) 2026 dynmsf developers.

structlog configuration for the library and the command line tools.
"""

import logging
import sys
from typing import Any, Optional

import structlog

_configured = False


def configure_logging(level: str = "INFO", json: bool = False, force: bool = False) -> None:
    """
    Configure structlog for the process

    Args:
        level: Standard level name (DEBUG, INFO, WARNING, ...)
        json: Render events as JSON lines instead of the console renderer
        force: Reconfigure even if logging was already set up
    """
    global _configured
    if _configured and not force:
        return

    numeric = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=numeric)

    renderer: Any
    if json:
        renderer = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=False)

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    _configured = True


def get_logger(name: Optional[str] = None, **initial: Any) -> Any:
    """Get a structlog logger bound to a module name"""
    logger = structlog.get_logger(name)
    if initial:
        logger = logger.bind(**initial)
    return logger
