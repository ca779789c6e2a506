"""Closed-form null predictions of the elbow statistic for unstructured data"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from elbowsig.utils.error_utils import ConfigError

log = logging.getLogger("elbowsig")


class Regime(str, Enum):
    LARGE_N = "large_n"
    LARGE_D = "large_d"


@dataclass(frozen=True)
class AsymptoticPrediction:
    regime: Regime
    method: str
    k: int
    value: float
    D: Optional[int] = None
    m: Optional[float] = None


def _check_k(k):
    if k < 2:
        raise ConfigError(f"predictions need k >= 2, got {k}")


def predicted_delta_large_n(D: float, k: float) -> float:
    """Large-N baseline (1 + 2/D) / k"""
    _check_k(k)
    if D < 1:
        raise ConfigError(f"D must be >= 1, got {D}")
    return (1.0 + 2.0 / D) / k


def predicted_delta_fcm(k: float, m: float) -> float:
    """Large-D FCM baseline [k^(1-m) - (k-1)^(1-m)] / [(k+1)^(1-m) - k^(1-m)] - 1"""
    _check_k(k)
    if not m > 1:
        raise ConfigError(f"fuzzifier m must be > 1, got {m}")
    e = 1.0 - m
    return (k**e - (k - 1) ** e) / ((k + 1) ** e - k**e) - 1.0


def fcm_growth_ratio(k: float) -> float:
    """(1 + delta_fcm(k, m+1)) / (1 + delta_fcm(k, m)) as m grows: the prediction has no finite m -> inf limit"""
    _check_k(k)
    return k / (k - 1.0)


def predicted_delta_gmm(k: float) -> float:
    """Large-D GMM baseline -ln(1 - k^-2) / ln(1 + k^-1), ~ 1/k for large k"""
    _check_k(k)
    return -np.log1p(-(k**-2.0)) / np.log1p(1.0 / k)


def predictions(D: int, k: int, m: float = 2.0):
    """The three predictions at one (D, k) as AsymptoticPrediction records"""
    return [
        AsymptoticPrediction(Regime.LARGE_N, "hard", k, predicted_delta_large_n(D, k), D=D),
        AsymptoticPrediction(Regime.LARGE_D, "fcm", k, predicted_delta_fcm(k, m), m=m),
        AsymptoticPrediction(Regime.LARGE_D, "gmm", k, predicted_delta_gmm(k)),
    ]


def prediction_table(dims: Iterable[int], k_values: Iterable[int], m: float = 2.0) -> pd.DataFrame:
    """Columns k, D, large_n, fcm, gmm for every (D, k) pair"""
    rows = [
        {
            "k": int(k),
            "D": int(D),
            "large_n": predicted_delta_large_n(D, k),
            "fcm": predicted_delta_fcm(k, m),
            "gmm": predicted_delta_gmm(k),
        }
        for D in dims
        for k in k_values
    ]
    return pd.DataFrame(rows, columns=["k", "D", "large_n", "fcm", "gmm"])


if __name__ == "__main__":
    print(prediction_table([2, 10], range(2, 6)))
