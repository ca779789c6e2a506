"""Tests for the closed-form null predictions"""

import numpy as np
import pytest

from elbowsig.core.theory import (
    Regime,
    fcm_growth_ratio,
    predicted_delta_fcm,
    predicted_delta_gmm,
    predicted_delta_large_n,
    prediction_table,
    predictions,
)
from elbowsig.utils.error_utils import ConfigError


def test_large_n_values():
    assert predicted_delta_large_n(2, 10) == pytest.approx(0.2)
    assert predicted_delta_large_n(1, 3) == pytest.approx(1.0)
    assert predicted_delta_large_n(1e12, 4) == pytest.approx(0.25)


def test_large_n_decreasing():
    values = np.array([[predicted_delta_large_n(D, k) for k in range(2, 12)] for D in (1, 2, 5, 20, 100)])
    assert np.all(np.diff(values, axis=1) < 0)
    assert np.all(np.diff(values, axis=0) < 0)


def test_fcm_values():
    assert predicted_delta_fcm(3, 2) == pytest.approx(1.0)
    assert predicted_delta_fcm(2, 2) == pytest.approx(2.0)


def test_fcm_positive_and_decreasing():
    for m in (1.2, 1.5, 2.0, 3.0, 6.0):
        values = np.array([predicted_delta_fcm(k, m) for k in range(2, 21)])
        assert np.all(values > 0)
        assert np.all(np.diff(values) < 0)


def test_fcm_large_m_growth():
    """1 + delta grows by k/(k-1) per unit of m once m is large"""
    ratio = (1 + predicted_delta_fcm(3, 61)) / (1 + predicted_delta_fcm(3, 60))
    assert abs(ratio - fcm_growth_ratio(3)) < 1e-6
    assert fcm_growth_ratio(3) == pytest.approx(1.5)


def test_gmm_values():
    assert predicted_delta_gmm(3) == pytest.approx(0.40942, abs=1e-5)
    assert predicted_delta_gmm(2) == pytest.approx(0.70951, abs=1e-5)
    assert abs(predicted_delta_gmm(1000) - 1e-3) < 1e-3


def test_gmm_approaches_one_over_k_from_above():
    scaled = np.array([k * predicted_delta_gmm(k) for k in range(2, 200)])
    assert np.all(scaled > 1)
    assert np.all(np.diff(scaled) < 0)
    assert scaled[-1] == pytest.approx(1.0, abs=5e-3)


def test_domain_errors():
    with pytest.raises(ConfigError):
        predicted_delta_large_n(2, 1)
    with pytest.raises(ConfigError):
        predicted_delta_large_n(0.5, 3)
    with pytest.raises(ConfigError):
        predicted_delta_fcm(3, 1.0)
    with pytest.raises(ConfigError):
        predicted_delta_gmm(1)


def test_predictions_records():
    records = predictions(5, 3, 2.0)
    assert [r.regime for r in records] == [Regime.LARGE_N, Regime.LARGE_D, Regime.LARGE_D]
    assert records[1].value == pytest.approx(1.0)


def test_prediction_table():
    table = prediction_table([2, 10], range(2, 6))
    assert table.columns.tolist() == ["k", "D", "large_n", "fcm", "gmm"]
    assert len(table) == 8
    row = table[(table["k"] == 3) & (table["D"] == 2)].iloc[0]
    assert row["large_n"] == pytest.approx(2 / 3)
    assert row["fcm"] == pytest.approx(1.0)


if __name__ == "__main__":
    test_large_n_values()
    test_fcm_values()
    test_gmm_values()
    print("All theory tests passed!")
