"""Tests for package logging."""

import logging
import sys
from pathlib import Path

# Add repo root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.utils.logger import PACKAGE_LOGGER, error, get_logger, setup_logging


class TestLogger:
    """Test the package logger hierarchy."""

    def setup_method(self):
        """Set up test fixtures."""
        self.logger = get_logger("src.riesz")

    def test_module_loggers_are_children(self):
        """Test module loggers hang under the package logger and own no handlers."""
        assert self.logger.name == f"{PACKAGE_LOGGER}.riesz"
        assert self.logger.parent is logging.getLogger(PACKAGE_LOGGER)
        assert self.logger.handlers == []
        assert self.logger.propagate

    def test_setup_is_idempotent(self):
        """Test repeated setup keeps a single set of handlers."""
        root = setup_logging()
        count = len(root.handlers)
        setup_logging()
        get_logger("src.spectrum")
        assert len(root.handlers) == count
        consoles = [h for h in root.handlers if type(h) is logging.StreamHandler]
        assert len(consoles) == 1

    def test_error_includes_exception(self, caplog):
        """Test the error helper logs the message and traceback."""
        caplog.set_level(logging.ERROR, logger=PACKAGE_LOGGER)
        try:
            raise ValueError("bad input")
        except ValueError as e:
            error("certify failed", e, self.logger)
        record = caplog.records[-1]
        assert record.name == f"{PACKAGE_LOGGER}.riesz"
        assert record.getMessage() == "certify failed: bad input"
        assert record.exc_info is not None
