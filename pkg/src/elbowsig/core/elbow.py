"""Elbow statistic: the normalized discrete curvature of a heterogeneity sequence"""

import logging
from dataclasses import dataclass
from typing import List, Union

import numpy as np

from elbowsig.core.clustering import HeterogeneitySequence
from elbowsig.utils.error_utils import ConfigError, NumericalError

log = logging.getLogger("elbowsig")

GUARD_FACTOR = 1e-12


@dataclass(frozen=True, eq=False)
class ElbowSequence:
    """delta_k for k = 2..k_max; degenerate_flags marks entries where |Delta H_k| fell under the guard"""

    k_values: np.ndarray
    delta: np.ndarray
    degenerate_flags: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k_values", np.asarray(self.k_values, dtype=int))
        object.__setattr__(self, "delta", np.asarray(self.delta, dtype=np.float64))
        object.__setattr__(self, "degenerate_flags", np.asarray(self.degenerate_flags, dtype=bool))
        if not len(self.k_values) == len(self.delta) == len(self.degenerate_flags):
            raise ConfigError("k_values, delta and degenerate_flags must have equal length")

    @property
    def k_max(self) -> int:
        return int(self.k_values[-1])

    def at(self, k: int) -> float:
        return float(self.delta[k - int(self.k_values[0])])

    def local_maxima(self) -> List[int]:
        """k where delta_k is strictly above each neighbour it has"""
        padded = np.concatenate(([-np.inf], self.delta, [-np.inf]))
        peaks = (padded[1:-1] > padded[:-2]) & (padded[1:-1] > padded[2:])
        return [int(k) for k in self.k_values[peaks]]


def _values(H: Union[HeterogeneitySequence, np.ndarray, list]) -> np.ndarray:
    values = H.H if isinstance(H, HeterogeneitySequence) else np.asarray(H, dtype=np.float64)
    if values.ndim != 1:
        raise ConfigError(f"heterogeneity must be a 1-D sequence, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise NumericalError("heterogeneity sequence contains non-finite values")
    return values


def first_difference(H) -> np.ndarray:
    """Delta H_k = H_{k+1} - H_k for k = 1..len(H)-1"""
    return np.diff(_values(H))


def second_difference(H) -> np.ndarray:
    """Delta^2 H_k = H_{k+1} - 2 H_k + H_{k-1} for k = 2..len(H)-1"""
    return np.diff(_values(H), n=2)


def denominator_guard(H_1: float) -> float:
    return GUARD_FACTOR * max(1.0, abs(H_1))


def elbow_sequence(H: Union[HeterogeneitySequence, np.ndarray, list]) -> ElbowSequence:
    """delta_k = -Delta^2 H_k / Delta H_k for k = 2..k_max, given H_1..H_{k_max+1}

    Args:
        H (HeterogeneitySequence | array-like): Heterogeneities starting at k = 1

    Returns:
        ElbowSequence: delta_k, zero (and flagged) where the first difference is below the guard
    """
    values = _values(H)
    if len(values) < 3:
        raise ConfigError(f"the elbow statistic needs H_1..H_(k_max+1) with k_max >= 2, got {len(values)} values")

    curvature = np.diff(values, n=2)
    slope = np.diff(values)[1:]
    degenerate = np.abs(slope) < denominator_guard(values[0])
    delta = np.zeros_like(curvature)
    delta[~degenerate] = -curvature[~degenerate] / slope[~degenerate]
    if degenerate.any():
        log.debug(f"Denominator guard fired at k={np.arange(2, len(values))[degenerate].tolist()}")
    return ElbowSequence(np.arange(2, len(values)), delta, degenerate)


if __name__ == "__main__":
    """Exercise the elbow statistic"""
    print(elbow_sequence([10.0, 4.0, 3.0, 2.5]).delta)
    print(elbow_sequence([10.0, 8.0, 6.0, 4.0, 2.0]).delta)
    geometric = elbow_sequence(5.0 * 0.5 ** np.arange(1, 8))
    print(geometric.delta, geometric.local_maxima())
