"""
Logging configuration for GAMSum.

Library modules only create ``gamsum.*`` loggers; the command line calls
``configure_logging`` once to install the handler.
"""

import logging
import sys
from typing import Optional, TextIO

from pythonjsonlogger import jsonlogger

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
JSON_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"
ROOT_LOGGER = "gamsum"


def configure_logging(level: str = "INFO", json_format: bool = False, stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Install a single stream handler on the ``gamsum`` logger.

    Args:
        level: Level name, e.g. "INFO" or "DEBUG"
        json_format: Emit one JSON object per record instead of text
        stream: Target stream, stderr by default

    Returns:
        The configured ``gamsum`` logger
    """
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        raise ValueError(f"Unknown log level: {level}")

    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    if json_format:
        handler.setFormatter(jsonlogger.JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(LOG_FORMAT))

    logger = logging.getLogger(ROOT_LOGGER)
    for existing in list(logger.handlers):
        logger.removeHandler(existing)
    logger.addHandler(handler)
    logger.setLevel(numeric_level)
    return logger
