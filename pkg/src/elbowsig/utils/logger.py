"""The 'elbowsig' logger: two extra levels, colored stderr output and exception forwarding"""

import os
import sys
import logging
import traceback
from contextlib import contextmanager

LOGGER_NAME = "elbowsig"
DEBUG_ENV = "ELBOWSIG_DEBUG"
TRUTHY = ("1", "true", "yes", "on")

# IMPORTANT is for run summaries (selected k, slopes), MONITOR for degraded runs (failed replicates)
IMPORTANT_LEVEL_NUM = 25  # Between INFO and WARNING
MONITOR_LEVEL_NUM = 35  # Between WARNING and ERROR


def _register_level(name: str, number: int):
    """Add a named level plus the matching Logger method (log.important(...), log.monitor(...))"""
    logging.addLevelName(number, name.upper())

    def log_at_level(self, message, *args, **kws):
        if self.isEnabledFor(number):
            self._log(number, message, args, **kws)

    setattr(logging.Logger, name.lower(), log_at_level)


_register_level("important", IMPORTANT_LEVEL_NUM)
_register_level("monitor", MONITOR_LEVEL_NUM)

LOG_FORMAT = "%(asctime)s (%(filename)s:%(lineno)d) %(levelname)s %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class ColoredFormatter(logging.Formatter):
    COLORS = {
        "DEBUG": "\x1b[38;5;60m",  # DarkGrey
        "INFO": "\x1b[38;5;69m",  # LightBlue
        "IMPORTANT": "\x1b[38;5;113m",  # LightGreen
        "WARNING": "\x1b[38;5;190m",  # DarkYellow
        "MONITOR": "\x1b[38;5;220m",  # Gold
        "ERROR": "\x1b[38;5;208m",  # Orange
        "CRITICAL": "\x1b[38;5;198m",  # Hot Pink
    }
    RESET = "\x1b[0m"

    def format(self, record):
        return f"{self.COLORS.get(record.levelname, self.RESET)}{super().format(record)}{self.RESET}"


def debug_requested() -> bool:
    return os.getenv(DEBUG_ENV, "").strip().lower() in TRUTHY


def logging_setup(color_logs=True):
    """Set up the 'elbowsig' logger once per process.

    Records go to stderr (stdout carries the CLI's tables and CSV); colors only on a terminal.
    """
    log = logging.getLogger(LOGGER_NAME)
    if getattr(log, "_is_setup", False):
        return
    log._is_setup = True
    log.propagate = False
    log.handlers.clear()

    handler = logging.StreamHandler(stream=sys.stderr)
    use_color = color_logs and hasattr(sys.stderr, "isatty") and sys.stderr.isatty()
    handler.setFormatter((ColoredFormatter if use_color else logging.Formatter)(LOG_FORMAT, datefmt=DATE_FORMAT))
    log.addHandler(handler)

    if debug_requested():
        log.setLevel(logging.DEBUG)
        log.debug(f"Debugging enabled via {DEBUG_ENV} environment variable.")
    else:
        log.setLevel(logging.INFO)


@contextmanager
def exception_log_forward(call_on_exception=None, quiet_for=()):
    """Log an unexpected exception (stack trace minus this frame) and re-raise it,
    or hand it to call_on_exception instead. Exceptions in quiet_for pass through untouched."""
    log = logging.getLogger(LOGGER_NAME)
    try:
        yield
    except quiet_for:
        raise
    except Exception as e:
        frames = traceback.extract_tb(e.__traceback__)[1:]
        last_line = traceback.format_exception_only(type(e), e)[-1]
        log.critical(f"Exception:\n{''.join(traceback.format_list(frames))}{last_line}")
        if not callable(call_on_exception):
            raise
        call_on_exception(e)
    finally:
        for handler in log.handlers:
            handler.flush()


if __name__ == "__main__":
    # Uncomment to test the ELBOWSIG_DEBUG env variable
    # os.environ["ELBOWSIG_DEBUG"] = "1"

    logging_setup()
    my_log = logging.getLogger(LOGGER_NAME)
    my_log.setLevel(logging.DEBUG)
    for level in ("debug", "info", "important", "warning", "monitor", "error", "critical"):
        getattr(my_log, level)(f"A {level} message")

    with exception_log_forward(call_on_exception=lambda e: print(f"Handled: {e}")):
        raise ValueError("Testing the exception handler")
