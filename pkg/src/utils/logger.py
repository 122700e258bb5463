"""Logging for the rgap package.

Every module logs through a child of the single ``rgap`` logger, which owns
the handlers: stderr for the console (stdout carries JSON run reports) and
an optional log file.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

from src.config import config

PACKAGE_LOGGER = "rgap"


def setup_logging(
    log_level: Optional[str] = None,
    log_file: Optional[str] = None,
    force: bool = False,
) -> logging.Logger:
    """Attach console and file handlers to the package logger once."""
    root = logging.getLogger(PACKAGE_LOGGER)
    if root.handlers and not force:
        return root

    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    level = (log_level or config.log_level).upper()
    root.setLevel(level)
    formatter = logging.Formatter(config.log_format)

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(max(logging.INFO, root.level))
    console.setFormatter(formatter)
    root.addHandler(console)

    path = log_file if log_file is not None else config.log_file_path
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    return root


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Child of the package logger named after the module's last component."""
    root = setup_logging()
    if not name:
        return root
    return root.getChild(name.rsplit(".", 1)[-1])


def error(message: str, exception: Optional[Exception] = None, logger: Optional[logging.Logger] = None) -> None:
    """Log an error, with the traceback when an exception is given."""
    logger = logger or get_logger()
    if exception is not None:
        logger.error(f"{message}: {exception}", exc_info=exception)
    else:
        logger.error(message)
