"""Tests for logger"""

import sys
import logging

import pytest

from elbowsig.utils.logger import (
    logging_setup,
    ColoredFormatter,
    exception_log_forward,
    IMPORTANT_LEVEL_NUM,
    MONITOR_LEVEL_NUM,
)
from elbowsig.utils.error_utils import ConfigError


def _reset(log):
    log._is_setup = False
    log.handlers.clear()


def test_logging_setup():
    """Test that logging_setup configures the elbowsig logger"""
    log = logging.getLogger("elbowsig")
    _reset(log)

    logging_setup()
    assert log._is_setup is True
    assert len(log.handlers) == 1
    assert log.propagate is False


def test_logging_setup_idempotent():
    """Test that calling logging_setup twice doesn't add duplicate handlers"""
    log = logging.getLogger("elbowsig")
    _reset(log)

    logging_setup()
    handler_count = len(log.handlers)
    logging_setup()
    assert len(log.handlers) == handler_count


def test_logs_go_to_stderr():
    """Standard output stays free for tables and CSV"""
    log = logging.getLogger("elbowsig")
    _reset(log)

    logging_setup(color_logs=False)
    assert log.handlers[0].stream is sys.stderr
    assert not isinstance(log.handlers[0].formatter, ColoredFormatter)


def test_logging_setup_debug_mode(monkeypatch):
    """Test that ELBOWSIG_DEBUG enables debug logging"""
    log = logging.getLogger("elbowsig")
    _reset(log)

    monkeypatch.setenv("ELBOWSIG_DEBUG", "True")
    logging_setup()
    assert log.level == logging.DEBUG

    _reset(log)
    monkeypatch.setenv("ELBOWSIG_DEBUG", "1")
    logging_setup()
    assert log.level == logging.DEBUG

    # Clean up
    _reset(log)
    monkeypatch.delenv("ELBOWSIG_DEBUG")
    logging_setup()
    assert log.level == logging.INFO


def test_custom_levels():
    """IMPORTANT sits between INFO and WARNING, MONITOR between WARNING and ERROR"""
    assert logging.INFO < IMPORTANT_LEVEL_NUM < logging.WARNING
    assert logging.WARNING < MONITOR_LEVEL_NUM < logging.ERROR
    log = logging.getLogger("elbowsig")
    log.important("Test important message")
    log.monitor("Test monitor message")


def test_colored_formatter():
    """Test ColoredFormatter applies colors"""
    formatter = ColoredFormatter("%(levelname)s %(message)s")
    record = logging.LogRecord(
        name="test", level=logging.INFO, pathname="", lineno=0, msg="hello", args=(), exc_info=None
    )
    result = formatter.format(record)
    assert "\x1b[" in result
    assert "hello" in result


def test_exception_log_forward_with_exception():
    """Test context manager re-raises exception"""
    with pytest.raises(ValueError, match="test error"):
        with exception_log_forward():
            raise ValueError("test error")


def test_exception_log_forward_with_callback():
    """Test context manager calls callback on exception"""
    callback_called = []

    with exception_log_forward(call_on_exception=lambda exc: callback_called.append(str(exc))):
        raise ValueError("callback test")

    assert callback_called == ["callback test"]


def test_exception_log_forward_quiet_for():
    """Expected errors pass through untouched, even with a callback"""
    callback_called = []
    with pytest.raises(ConfigError):
        with exception_log_forward(call_on_exception=callback_called.append, quiet_for=(ConfigError,)):
            raise ConfigError("bad flag")
    assert callback_called == []


if __name__ == "__main__":
    test_logging_setup()
    test_colored_formatter()
    test_custom_levels()
    print("All logger tests passed!")
