"""Design file helpers: flat key-value TOML files describing an experiment"""

import sys
import logging
from dataclasses import fields
from pathlib import Path
from typing import Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from elbowsig.utils.error_utils import ConfigError

log = logging.getLogger("elbowsig")


def read_flat_toml(path: Union[str, Path]) -> dict:
    """Read a TOML file whose top level holds only scalars and lists of scalars.

    Args:
        path (str | Path): The design file

    Returns:
        dict: key -> value
    """
    path = Path(path)
    try:
        with path.open("rb") as fp:
            raw = tomllib.load(fp)
    except FileNotFoundError:
        raise ConfigError(f"design file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"design file {path} is not valid TOML: {e}")

    nested = [key for key, value in raw.items() if isinstance(value, dict)]
    if nested:
        raise ConfigError(f"design file {path} must be flat; found tables: {nested}")
    return raw


def build_design(design_cls, values: dict, source: str = "design"):
    """Instantiate a design dataclass from a flat mapping, rejecting unknown keys.

    Args:
        design_cls: A dataclass type (e.g. ExperimentDesign)
        values (dict): key -> value
        source (str): Name used in error messages

    Returns:
        An instance of design_cls (its __post_init__ validates the values)
    """
    known = {f.name for f in fields(design_cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"{source}: unknown keys {unknown}; expected a subset of {sorted(known)}")
    converted = {key: tuple(value) if isinstance(value, list) else value for key, value in values.items()}
    try:
        return design_cls(**converted)
    except TypeError as e:
        raise ConfigError(f"{source}: {e}")


def load_design(design_cls, path: Union[str, Path], **overrides):
    """Read a flat TOML design file into design_cls, applying non-None overrides"""
    values = read_flat_toml(path)
    values.update({key: value for key, value in overrides.items() if value is not None})
    log.info(f"Loaded design {path} ({len(values)} keys)")
    return build_design(design_cls, values, source=str(path))
