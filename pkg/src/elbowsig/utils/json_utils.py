"""JSON Utilities: deterministic text for ElbowSig reports, experiment results and designs"""

import json
import logging
from dataclasses import asdict, is_dataclass
from datetime import date, datetime, timezone
from enum import Enum
from pathlib import PurePath

import numpy as np
import pandas as pd

log = logging.getLogger("elbowsig")

DATETIME_TAG = "__datetime__"
DATAFRAME_TAG = "__dataframe__"


def utc_timestamp() -> str:
    """Current UTC time as an ISO-8601 string (millisecond precision, 'Z' suffix)"""
    return datetime.now(timezone.utc).isoformat("T", "milliseconds").replace("+00:00", "Z")


def _frame_payload(df: pd.DataFrame) -> dict:
    return {DATAFRAME_TAG: True, "df": df.to_dict(orient="list"), "columns": df.columns.tolist()}


# Checked in order: numpy scalars before the Python types they may subclass
_CONVERTERS = (
    (np.bool_, bool),
    (np.integer, int),
    (np.floating, float),
    (np.ndarray, lambda a: a.tolist()),
    ((set, frozenset), sorted),
    (Enum, lambda e: e.value),
    (PurePath, str),
    ((datetime, date), lambda d: {DATETIME_TAG: True, "datetime": d.isoformat()}),
    (pd.DataFrame, _frame_payload),
)


class CustomEncoder(json.JSONEncoder):
    """numpy, sets, enums, paths, dates, DataFrames and dataclasses; optional float rounding"""

    def __init__(self, precision=None, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.precision = precision

    def default(self, obj):
        for types, convert in _CONVERTERS:
            if isinstance(obj, types):
                return convert(obj)
        if is_dataclass(obj) and not isinstance(obj, type):
            return asdict(obj)
        log.error(f"Failed to encode object of type {type(obj).__name__}")
        return super().default(obj)

    def encode(self, obj):
        return super().encode(self._round(obj) if self.precision else obj)

    def _round(self, obj):
        if isinstance(obj, float):
            return round(obj, self.precision)
        if isinstance(obj, dict):
            return {k: self._round(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self._round(item) for item in obj]
        return obj


def custom_decoder(dct):
    """object_hook inverting the tagged payloads of CustomEncoder"""
    try:
        if DATETIME_TAG in dct:
            return datetime.fromisoformat(dct["datetime"])
        if DATAFRAME_TAG in dct:
            return pd.DataFrame(dct["df"], columns=dct.get("columns"))
    except (TypeError, ValueError) as e:
        log.error(f"Failed to decode object: {e}")
    return dct


def dumps(obj, precision=None) -> str:
    """Deterministic JSON text: sorted keys, two-space indent"""
    return json.dumps(obj, cls=CustomEncoder, precision=precision, sort_keys=True, indent=2)


def loads(text: str):
    return json.loads(text, object_hook=custom_decoder)


if __name__ == "__main__":
    from elbowsig.core.data_model import RngSpec

    encoded = dumps(
        {
            "p": np.array([0.0, 0.005, 0.42]),
            "significant": {5, 2, 3},
            "rng": RngSpec(7),
            "counts": pd.DataFrame({"k": [2, 3], "count": [1, 99]}),
        }
    )
    print(encoded)
    print(loads(encoded))
    print(dumps({"pi": 3.141592653589793}, precision=3))
