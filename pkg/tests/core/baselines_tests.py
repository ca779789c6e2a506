"""Tests for the gap statistic and the CH / DB / silhouette selectors"""

import numpy as np
import pytest

from elbowsig.core.baselines import (
    ValidityIndex,
    calinski_harabasz,
    davies_bouldin,
    gap_from_inertia,
    gap_statistic,
    index_curve,
    select_indices,
    silhouette,
)
from elbowsig.core.clustering import MethodConfig, fit_sequence
from elbowsig.core.data_model import Dataset, RngSpec
from elbowsig.utils.error_utils import ConfigError, NumericalError


def _three_blobs(seed=1) -> Dataset:
    centers = np.array([[0.0] * 5, [12.0] * 5, [0.0, 12.0, 0.0, 12.0, 0.0]])
    generator = np.random.default_rng(seed)
    return Dataset(np.repeat(centers, 50, axis=0) + generator.standard_normal((150, 5)))


def test_validity_index_parse():
    assert ValidityIndex.parse("CH") is ValidityIndex.CH
    assert not ValidityIndex.DB.maximize
    with pytest.raises(ConfigError):
        ValidityIndex.parse("dunn")


def test_gap_zero_when_reference_is_the_data():
    w = np.array([100.0, 40.0, 20.0, 15.0])
    result = gap_from_inertia(w, w[None, :])
    assert np.allclose(result.gap, 0.0)
    assert np.allclose(result.s_k, 0.0)
    assert result.k_hat_I == 1


def test_gap_rules():
    """Rule I takes the first k with Gap(k) >= Gap(k+1) - s_(k+1), rule II the maximizer"""
    w_ref = np.exp(np.array([[1.0, 0.0, -0.5, -1.0, -1.5], [1.2, 0.2, -0.3, -0.8, -1.3]]))
    w_data = np.exp(np.array([1.1, -0.4, -1.5, -1.75, -2.0]))
    result = gap_from_inertia(w_data, w_ref)
    assert np.allclose(result.gap, [0.0, 0.5, 1.1, 0.85, 0.6])
    assert np.allclose(result.s_k, 0.1 * np.sqrt(1.5))
    assert result.k_hat_I == 3
    assert result.k_hat_II == 3
    assert not result.fallback_I


def test_gap_rule_one_fallback():
    result = gap_from_inertia(np.exp(-np.arange(4.0)), np.ones((1, 4)))
    assert result.fallback_I
    assert result.k_hat_I == 4
    assert result.k_hat_II == 4


def test_gap_rule_one_with_smaller_s_k():
    """Shrinking s_k (more references agreeing) never lowers k_hat_I"""
    generator = np.random.default_rng(3)
    w_data = np.exp(-np.sort(generator.uniform(0, 3, 6)))
    spread = np.exp(generator.normal(0, 0.3, size=(20, 6)) - np.linspace(0, 2, 6))
    tight = np.exp(np.log(spread).mean(axis=0))[None, :].repeat(20, axis=0)
    wide = gap_from_inertia(w_data, spread)
    narrow = gap_from_inertia(w_data, tight)
    assert np.allclose(narrow.gap, wide.gap)
    assert narrow.k_hat_I >= wide.k_hat_I


def test_gap_zero_inertia():
    with pytest.raises(NumericalError, match="k=3"):
        gap_from_inertia([5.0, 2.0, 0.0], np.ones((4, 3)))
    with pytest.raises(NumericalError, match="reference 1"):
        gap_from_inertia([5.0, 2.0, 1.0], np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 1.0]]))


def test_gap_statistic_three_blobs():
    config = MethodConfig(method="agglomerative")
    result = gap_statistic(_three_blobs(), config, 6, 20, "bbox", RngSpec(4), threads=2)
    assert result.k_values.tolist() == [1, 2, 3, 4, 5, 6]
    assert result.k_hat_I == 3
    assert result.k_hat_II >= 3


def test_gap_statistic_null_data():
    """Data drawn like its own references has mean Gap(k) within 3 s_k of zero"""
    generator = np.random.default_rng(5)
    config = MethodConfig(method="agglomerative")
    results = [
        gap_statistic(Dataset(generator.uniform(size=(100, 2))), config, 5, 30, "bbox", RngSpec(s)) for s in range(5)
    ]
    mean_gap = np.mean([r.gap for r in results], axis=0)
    s_k = np.mean([r.s_k for r in results], axis=0)
    assert np.all(np.abs(mean_gap) < 3 * s_k)
    assert all(1 <= r.k_hat_I <= 5 for r in results)


def test_gap_statistic_needs_references():
    with pytest.raises(ConfigError):
        gap_statistic(_three_blobs(), MethodConfig(), 4, 1, "pca", RngSpec(1))


def test_silhouette_separated_blobs():
    data = Dataset(np.array([[0.0], [0.1], [10.0], [10.1]]))
    assert silhouette(data, [0, 0, 1, 1]) > 0.95


def test_silhouette_random_labels():
    generator = np.random.default_rng(7)
    scores = []
    for _ in range(50):
        data = Dataset(generator.uniform(size=(60, 2)))
        scores.append(silhouette(data, generator.integers(0, 3, size=60)))
    assert abs(np.mean(scores)) < 0.1


def test_silhouette_all_singletons():
    data = Dataset(np.arange(4.0))
    assert silhouette(data, [0, 1, 2, 3]) == 0.0


def test_degenerate_scores():
    identical = Dataset(np.ones((4, 2)))
    assert davies_bouldin(identical, [0, 0, 1, 1]) == 0.0
    with pytest.raises(NumericalError):
        calinski_harabasz(identical, [0, 0, 1, 1])
    with pytest.raises(ConfigError):
        silhouette(identical, [0, 0, 0, 0])


def test_calinski_harabasz_by_hand():
    data = Dataset(np.array([[0.0], [2.0], [10.0], [12.0]]))
    # B = 4 * 25 = 100 over k-1 = 1; W = 4 over N-k = 2
    assert calinski_harabasz(data, [0, 0, 1, 1]) == pytest.approx(50.0)


def test_index_curves_pick_three_blobs():
    curves = select_indices(_three_blobs(), MethodConfig(method="agglomerative"), 6)
    assert set(curves) == set(ValidityIndex)
    for curve in curves.values():
        assert curve.k_values.tolist() == [2, 3, 4, 5, 6]
        assert curve.k_hat == 3


def test_selectors_invariant_under_isometries():
    data = _three_blobs(seed=8)
    rotation, _ = np.linalg.qr(np.random.default_rng(9).normal(size=(5, 5)))
    moved = Dataset(data.values @ rotation + 3.0)
    config = MethodConfig(method="agglomerative")
    for index in (ValidityIndex.CH, ValidityIndex.SILHOUETTE):
        before = index_curve(data, fit_sequence(data, config, range(2, 7)), index)
        after = index_curve(moved, fit_sequence(moved, config, range(2, 7)), index)
        assert before.k_hat == after.k_hat
        assert np.allclose(before.scores, after.scores, rtol=1e-8)


def test_index_curve_needs_partitions():
    data = _three_blobs()
    with pytest.raises(ConfigError):
        index_curve(data, fit_sequence(data, MethodConfig(), [1]), "ch")
    with pytest.raises(ConfigError):
        select_indices(data, MethodConfig(), 1)


if __name__ == "__main__":
    test_gap_rules()
    test_gap_statistic_three_blobs()
    test_index_curves_pick_three_blobs()
    print("All baselines tests passed!")
