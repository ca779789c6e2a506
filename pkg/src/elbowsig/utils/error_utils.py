"""ElbowSig exceptions and helpers that tag errors with the stage they came from"""

import logging
import functools
from contextlib import contextmanager
from typing import Callable, Dict, Optional, Type

log = logging.getLogger("elbowsig")


class ElbowSigError(Exception):
    """Base class for all ElbowSig errors"""


class ConfigError(ElbowSigError, ValueError):
    """Invalid parameter, flag, or experiment design"""


class DataError(ElbowSigError, ValueError):
    """Unreadable, ragged, non-numeric, or non-finite input data"""


class NumericalError(ElbowSigError, ArithmeticError):
    """A computation has no finite answer (singular covariance, log of zero, ...)"""


def _context_prefix(stage: str, context: dict) -> str:
    details = ", ".join(f"{key}={value}" for key, value in context.items())
    return f"[{stage}{': ' + details if details else ''}]"


@contextmanager
def tagged(stage: str, **context):
    """Re-raise any ElbowSigError with the stage and context (k, reference, ...) prepended.

    Args:
        stage (str): Name of the stage (e.g. "fit", "reference", "replicate")
        **context: Extra identifiers for the message (e.g. k=3, reference=17)
    """
    try:
        yield
    except ElbowSigError as error:
        prefix = _context_prefix(stage, context)
        log.debug(f"{prefix} {error}")
        raise type(error)(f"{prefix} {error}") from error


@contextmanager
def translated(stage: str, mapping: Dict[Type[Exception], Type[ElbowSigError]], **context):
    """Re-raise library exceptions as ElbowSig errors tagged with the stage.

    Args:
        stage (str): Name of the stage (e.g. "write", "simulate")
        mapping (dict): Library exception type -> ElbowSigError subclass, first match wins
        **context: Extra identifiers for the message (e.g. out=path)
    """
    try:
        yield
    except ElbowSigError:
        raise
    except tuple(mapping) as error:
        target = next(ours for foreign, ours in mapping.items() if isinstance(error, foreign))
        raise target(f"{_context_prefix(stage, context)} {type(error).__name__}: {error}") from error


def tag_errors(func: Optional[Callable] = None, *, stage: Optional[str] = None) -> Callable:
    """Decorator: run the function inside tagged(stage) so its errors name where they came from.

    Args:
        func (Callable, optional): The function being decorated.
        stage (str, optional): Stage name, defaults to the function name.
    """

    def decorator(inner_func: Callable) -> Callable:
        stage_name = stage or inner_func.__name__

        @functools.wraps(inner_func)
        def wrapper(*args, **kwargs):
            with tagged(stage_name):
                return inner_func(*args, **kwargs)

        return wrapper

    # Called with or without arguments
    if func is None:
        return decorator
    return decorator(func)


if __name__ == "__main__":
    """Exercise the error helpers"""

    @tag_errors(stage="demo")
    def will_fail():
        with tagged("fit", k=3):
            raise NumericalError("covariance is singular")

    try:
        will_fail()
    except NumericalError as e:
        print(f"AOK Expected Error: {e}")
