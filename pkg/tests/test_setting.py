import pytest
import sys
import os
import logging
import tempfile
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from bose_core import setting
from bose_core.config import SolverSettings

LOGGER_NAMES = [
    "bose_core.test.quiet",
    "bose_core.test.console",
    "bose_core.test.file",
    "bose_core.test.settings",
    "bose_core.test.repeat",
    "bose_core.test.format",
]


class TestSetupLogger:
    """Test cases for setup_logger"""

    def test_quiet_by_default(self):
        """Without console or file nothing is attached"""
        logger = setting.setup_logger("bose_core.test.quiet", logging.DEBUG)

        assert logger.level == logging.DEBUG
        assert logger.handlers == []

    def test_console_handler(self):
        logger = setting.setup_logger("bose_core.test.console", logging.INFO, enable_console=True)

        assert len(logger.handlers) == 1
        assert type(logger.handlers[0]) is logging.StreamHandler

    def test_file_handler(self):
        """The file handler writes UTF-8 to the given path"""
        with tempfile.TemporaryDirectory() as temp_dir:
            log_file = Path(temp_dir) / "solve.log"
            logger = setting.setup_logger("bose_core.test.file", logging.WARNING, filename=str(log_file))
            try:
                assert isinstance(logger.handlers[0], logging.FileHandler)
                logger.warning("λ_min below floor")
                logger.info("not written")
                logger.handlers[0].flush()
                content = log_file.read_text(encoding="utf-8")
                assert "λ_min below floor" in content
                assert "not written" not in content
            finally:
                logger.handlers[0].close()

    def test_level_from_settings(self):
        """The level string of SolverSettings is accepted as is"""
        settings = SolverSettings(log_level="warning")
        logger = setting.setup_logger("bose_core.test.settings", settings.log_level)
        assert logger.level == logging.WARNING

    def test_repeated_setup_does_not_duplicate_handlers(self):
        """Each CLI run calls setup_logger again on the same logger"""
        with tempfile.TemporaryDirectory() as temp_dir:
            log_file = str(Path(temp_dir) / "repeat.log")
            for level in (logging.INFO, logging.DEBUG):
                logger = setting.setup_logger(
                    "bose_core.test.repeat", level, filename=log_file, enable_console=True
                )

            assert len(logger.handlers) == 2
            assert all(h.level == logging.DEBUG for h in logger.handlers)
            for handler in logger.handlers:
                handler.close()

    def test_formatter(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            logger = setting.setup_logger(
                "bose_core.test.format",
                filename=str(Path(temp_dir) / "format.log"),
                enable_console=True,
            )

            for handler in logger.handlers:
                assert handler.formatter._fmt == setting.LOG_FORMAT
                assert handler.formatter.datefmt == setting.LOG_DATE_FORMAT
                handler.close()

    def teardown_method(self):
        """Remove handlers so tests do not see each other's output"""
        for name in LOGGER_NAMES:
            logger = logging.getLogger(name)
            for handler in logger.handlers[:]:
                logger.removeHandler(handler)


class TestParseLevel:
    """Test cases for parse_level"""

    @pytest.mark.parametrize(
        "value, expected",
        [("debug", logging.DEBUG), ("INFO", logging.INFO), ("Warning", logging.WARNING), (logging.ERROR, logging.ERROR)],
    )
    def test_known_levels(self, value, expected):
        assert setting.parse_level(value) == expected

    def test_unknown_level(self):
        with pytest.raises(ValueError):
            setting.parse_level("LOUD")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
