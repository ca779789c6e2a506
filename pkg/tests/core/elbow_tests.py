"""Tests for the elbow statistic"""

import numpy as np
import pytest

from elbowsig.core.clustering import HeterogeneitySequence
from elbowsig.core.elbow import denominator_guard, elbow_sequence, first_difference, second_difference
from elbowsig.utils.error_utils import ConfigError, NumericalError


def test_linear_sequence_is_flat():
    result = elbow_sequence([10.0, 8.0, 6.0, 4.0, 2.0])
    assert result.k_values.tolist() == [2, 3, 4]
    assert np.array_equal(result.delta, [0.0, 0.0, 0.0])
    assert not result.degenerate_flags.any()


def test_hand_evaluated_sequence():
    result = elbow_sequence(HeterogeneitySequence.from_values([10.0, 4.0, 3.0, 2.5]))
    assert np.allclose(result.delta, [5.0, 1.0])
    assert result.at(2) == pytest.approx(5.0)
    assert result.k_max == 3


def test_geometric_sequence():
    """H_k = c r^k gives delta_k = (1 - r) / r at every k"""
    for r in (0.2, 0.5, 0.9):
        result = elbow_sequence(3.0 * r ** np.arange(1, 10))
        assert np.allclose(result.delta, (1 - r) / r, rtol=1e-10)


def test_affine_invariance():
    H = np.array([50.0, 20.0, 12.0, 9.0, 8.0, 7.5])
    base = elbow_sequence(H).delta
    for a, b in ((2.0, 0.0), (0.3, 100.0), (7.0, -4.0)):
        assert np.allclose(elbow_sequence(a * H + b).delta, base, rtol=1e-10, atol=1e-10)


def test_index_alignment():
    """delta_k only reads H_(k-1), H_k and H_(k+1)"""
    H = np.array([30.0, 14.0, 9.0, 7.0, 6.0, 5.5])
    base = elbow_sequence(H)
    changed = H.copy()
    changed[5] = 5.0
    moved = elbow_sequence(changed)
    assert np.array_equal(moved.delta[:3], base.delta[:3])
    assert moved.at(5) != base.at(5)


def test_denominator_guard():
    result = elbow_sequence([10.0, 5.0, 5.0, 5.0])
    assert np.array_equal(result.delta, [0.0, 0.0])
    assert result.degenerate_flags.tolist() == [True, True]
    assert np.all(np.isfinite(result.delta))
    assert denominator_guard(0.5) == 1e-12
    assert denominator_guard(-1e6) == pytest.approx(1e-6)


def test_differences():
    H = [10.0, 4.0, 3.0, 2.5]
    assert first_difference(H).tolist() == [-6.0, -1.0, -0.5]
    assert second_difference(H).tolist() == [5.0, 0.5]


def test_local_maxima():
    result = elbow_sequence([100.0, 40.0, 30.0, 10.0, 8.0, 7.0, 6.5])
    peak = int(result.k_values[np.argmax(result.delta)])
    assert peak in result.local_maxima()
    for k in result.local_maxima():
        i = k - 2
        assert all(result.delta[i] > result.delta[j] for j in (i - 1, i + 1) if 0 <= j < len(result.delta))


def test_errors():
    with pytest.raises(ConfigError):
        elbow_sequence([3.0, 2.0])
    with pytest.raises(NumericalError):
        elbow_sequence([3.0, np.nan, 1.0, 0.5])


if __name__ == "__main__":
    test_hand_evaluated_sequence()
    test_geometric_sequence()
    print("All elbow tests passed!")
