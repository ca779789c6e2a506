"""Classical cluster-number selectors: gap statistic (rules I and II), Calinski-Harabasz,
Davies-Bouldin and silhouette"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional

import numpy as np
from sklearn.metrics import calinski_harabasz_score, davies_bouldin_score, silhouette_score

from elbowsig.core.clustering import ClusteringOutcome, MethodConfig, fit_sequence, inertia
from elbowsig.core.data_model import Dataset, RngSpec
from elbowsig.core.inference import observed_sequence
from elbowsig.core.reference_gen import build_ensemble
from elbowsig.utils.error_utils import ConfigError, NumericalError, tag_errors, tagged

log = logging.getLogger("elbowsig")


class ValidityIndex(str, Enum):
    CH = "ch"
    DB = "db"
    SILHOUETTE = "silhouette"

    @property
    def maximize(self) -> bool:
        return self is not ValidityIndex.DB

    @classmethod
    def parse(cls, value) -> "ValidityIndex":
        try:
            return cls(str(getattr(value, "value", value)).lower())
        except ValueError:
            raise ConfigError(f"unknown validity index {value!r}; choose from {[i.value for i in cls]}")


@dataclass(frozen=True, eq=False)
class GapResult:
    """Gap(k), s_k and the two selection rules over k = 1..k_max.
    fallback_I is set when no k satisfied rule I and k_hat_I defaulted to k_max."""

    k_values: np.ndarray
    gap: np.ndarray
    s_k: np.ndarray
    log_w: np.ndarray
    mean_log_w_ref: np.ndarray
    k_hat_I: int
    k_hat_II: int
    fallback_I: bool = False

    def to_dict(self) -> dict:
        return {
            "k_values": self.k_values,
            "gap": self.gap,
            "s_k": self.s_k,
            "k_hat_I": self.k_hat_I,
            "k_hat_II": self.k_hat_II,
            "fallback_I": self.fallback_I,
        }


@dataclass(frozen=True, eq=False)
class IndexCurve:
    index: ValidityIndex
    k_values: np.ndarray
    scores: np.ndarray
    k_hat: int

    def to_dict(self) -> dict:
        return {"index": self.index.value, "k_values": self.k_values, "scores": self.scores, "k_hat": self.k_hat}


def gap_from_inertia(w_data: Iterable[float], w_ref: np.ndarray) -> GapResult:
    """Gap arithmetic from within-cluster inertias.

    Args:
        w_data (array-like): W_k of the data for k = 1..k_max
        w_ref (np.ndarray): B x k_max matrix of reference W_k

    Returns:
        GapResult: Gap(k) = mean_r ln W_k^(r) - ln W_k, s_k = sd_r(ln W_k^(r)) * sqrt(1 + 1/B)
    """
    w_data = np.asarray(w_data, dtype=np.float64)
    w_ref = np.atleast_2d(np.asarray(w_ref, dtype=np.float64))
    if w_ref.shape[1] != len(w_data):
        raise ConfigError(f"reference inertia has {w_ref.shape[1]} columns for {len(w_data)} values of k")
    if np.any(w_data <= 0):
        k = int(np.flatnonzero(w_data <= 0)[0]) + 1
        raise NumericalError(f"gap statistic undefined: W_k = 0 for the data at k={k}")
    if np.any(w_ref <= 0):
        r, j = np.argwhere(w_ref <= 0)[0]
        raise NumericalError(f"gap statistic undefined: W_k = 0 for reference {r} at k={j + 1}")

    n_ref = w_ref.shape[0]
    log_w = np.log(w_data)
    log_ref = np.log(w_ref)
    mean_log_ref = log_ref.mean(axis=0)
    gap = mean_log_ref - log_w
    s_k = log_ref.std(axis=0) * np.sqrt(1.0 + 1.0 / n_ref)

    k_max = len(gap)
    k_values = np.arange(1, k_max + 1)
    passing = np.flatnonzero(gap[:-1] >= gap[1:] - s_k[1:])
    fallback = len(passing) == 0
    k_hat_I = k_max if fallback else int(passing[0]) + 1
    if fallback:
        log.warning(f"Gap(I): no k in [1, {k_max - 1}] satisfies the rule, returning k_max={k_max}")
    return GapResult(k_values, gap, s_k, log_w, mean_log_ref, k_hat_I, int(np.argmax(gap)) + 1, fallback)


@tag_errors(stage="gap")
def gap_statistic(
    data: Dataset,
    config: MethodConfig,
    k_max: int,
    n_ref: int,
    reference_type,
    rng: RngSpec,
    threads: Optional[int] = None,
) -> GapResult:
    """Gap statistic with the configured clustering backend and reference generator.
    Uses the same streams as an analysis with the same rng, so the fits coincide."""
    if n_ref < 2:
        raise ConfigError(f"the gap statistic needs n_ref >= 2, got {n_ref}")
    sequence = observed_sequence(data, config, k_max, rng)
    ensemble = build_ensemble(data, config, k_max, n_ref, reference_type, rng.derive(1), threads)
    return gap_from_inertia(sequence.inertia[:k_max], ensemble.inertia[:, :k_max])


def _cluster_count(labels: np.ndarray, index: str) -> int:
    n_clusters = len(np.unique(labels))
    if n_clusters < 2:
        raise ConfigError(f"{index} needs at least 2 clusters, got {n_clusters}")
    return n_clusters


def calinski_harabasz(data: Dataset, labels) -> float:
    """[B/(k-1)] / [W/(N-k)] with B, W the between and within scatter"""
    labels = np.asarray(labels)
    _cluster_count(labels, "Calinski-Harabasz")
    if inertia(data, labels) == 0:
        raise NumericalError("Calinski-Harabasz is undefined: within-cluster scatter is zero")
    return float(calinski_harabasz_score(data.values, labels))


def davies_bouldin(data: Dataset, labels) -> float:
    """Mean over clusters of the worst (s_i + s_j) / d_ij; 0 when every centroid coincides"""
    labels = np.asarray(labels)
    _cluster_count(labels, "Davies-Bouldin")
    return float(davies_bouldin_score(data.values, labels))


def silhouette(data: Dataset, labels) -> float:
    """Mean of (b - a) / max(a, b); singleton clusters contribute 0"""
    labels = np.asarray(labels)
    n_clusters = _cluster_count(labels, "silhouette")
    if n_clusters >= data.n:
        return 0.0
    return float(silhouette_score(data.values, labels, metric="euclidean"))


_INDEX_FUNCTIONS = {
    ValidityIndex.CH: calinski_harabasz,
    ValidityIndex.DB: davies_bouldin,
    ValidityIndex.SILHOUETTE: silhouette,
}


def index_curve(data: Dataset, outcomes: List[ClusteringOutcome], index) -> IndexCurve:
    """Score the partitions at k = 2..k_max and select k by argmax (CH, silhouette) or argmin (DB)"""
    index = ValidityIndex.parse(index)
    outcomes = [o for o in outcomes if o.k >= 2]
    if not outcomes:
        raise ConfigError("index curves need partitions with k >= 2")
    scores = []
    for outcome in outcomes:
        with tagged(index.value, k=outcome.k):
            scores.append(_INDEX_FUNCTIONS[index](data, outcome.hard_labels))
    scores = np.array(scores)
    k_values = np.array([o.k for o in outcomes])
    best = int(np.argmax(scores)) if index.maximize else int(np.argmin(scores))
    return IndexCurve(index, k_values, scores, int(k_values[best]))


def select_indices(
    data: Dataset, config: MethodConfig, k_max: int, indices: Iterable = tuple(ValidityIndex)
) -> Dict[ValidityIndex, IndexCurve]:
    """CH / DB / silhouette curves over one set of partitions from the configured backend"""
    if k_max < 2 or k_max > data.n:
        raise ConfigError(f"k_max must lie in [2, N={data.n}], got {k_max}")
    outcomes = fit_sequence(data, config, range(2, k_max + 1))
    return {ValidityIndex.parse(i): index_curve(data, outcomes, i) for i in indices}


if __name__ == "__main__":
    """Exercise the baselines"""
    generator = np.random.default_rng(1)
    centers = np.repeat([[0.0, 0.0], [8.0, 8.0], [0.0, 8.0]], 30, axis=0)
    points = Dataset(centers + generator.normal(size=centers.shape))
    cfg = MethodConfig(rng=RngSpec(3))
    print(gap_statistic(points, cfg, 6, 20, "bbox", RngSpec(3)).to_dict())
    for curve in select_indices(points, cfg, 6).values():
        print(curve.index.value, curve.k_hat, curve.scores.round(3))
