"""Null reference datasets (bounding-box and PCA-aligned uniform) and reference ensembles"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from elbowsig.core.clustering import ClusteringMethod, MethodConfig, heterogeneity_sequence
from elbowsig.core.data_model import Dataset, RngSpec, column_ranges
from elbowsig.core.elbow import elbow_sequence
from elbowsig.utils.error_utils import ConfigError, DataError, tagged
from elbowsig.utils.parallel import parallel_map

log = logging.getLogger("elbowsig")


class ReferenceType(str, Enum):
    BBOX = "bbox"
    PCA = "pca"

    @classmethod
    def parse(cls, value) -> "ReferenceType":
        aliases = {"boundingboxuniform": cls.BBOX, "pcaaligneduniform": cls.PCA}
        text = str(getattr(value, "value", value)).lower()
        if text in aliases:
            return aliases[text]
        try:
            return cls(text)
        except ValueError:
            raise ConfigError(f"unknown reference type {value!r}; choose from {[r.value for r in cls]}")


@dataclass(frozen=True, eq=False)
class PcaFrame:
    """Principal-axis frame of a dataset: scores = (X - mean) @ axes, X = scores @ axes.T + mean"""

    mean: np.ndarray
    axes: np.ndarray
    lows: np.ndarray
    highs: np.ndarray
    rank: int

    def to_scores(self, values: np.ndarray) -> np.ndarray:
        return (values - self.mean) @ self.axes

    def from_scores(self, scores: np.ndarray) -> np.ndarray:
        return scores @ self.axes.T + self.mean


def pca_frame(data: Dataset) -> PcaFrame:
    """Orthonormal principal axes of the centred data and the observed score ranges on each axis.
    Axes beyond the numerical rank get a zero range."""
    X = data.values
    if np.all(X.max(axis=0) == X.min(axis=0)):
        raise DataError("PCA reference is undefined: all rows of the data are identical")

    mean = X.mean(axis=0)
    centered = X - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=True)
    tolerance = singular[0] * max(X.shape) * np.finfo(np.float64).eps
    rank = int((singular > tolerance).sum())

    axes = vt.T
    scores = centered @ axes
    lows = scores.min(axis=0)
    highs = scores.max(axis=0)
    lows[rank:] = 0.0
    highs[rank:] = 0.0
    return PcaFrame(mean, axes, lows, highs, rank)


def gen_bbox_uniform(data: Dataset, rng: RngSpec) -> Dataset:
    """Every feature i.i.d. uniform over its observed range"""
    ranges = np.array(column_ranges(data))
    lows, highs = ranges[:, 0], ranges[:, 1]
    unit = rng.generator().random((data.n, data.d))
    values = np.clip(lows + unit * (highs - lows), lows, highs)
    return Dataset(values, feature_names=data.feature_names)


def gen_pca_uniform(data: Dataset, rng: RngSpec) -> Dataset:
    """Uniform in the observed box of principal-component scores, rotated back and shifted to the data mean"""
    frame = pca_frame(data)
    unit = rng.generator().random((data.n, data.d))
    scores = frame.lows + unit * (frame.highs - frame.lows)
    return Dataset(frame.from_scores(scores), feature_names=data.feature_names)


_GENERATORS = {ReferenceType.BBOX: gen_bbox_uniform, ReferenceType.PCA: gen_pca_uniform}


def generate_reference(data: Dataset, reference_type, rng: RngSpec) -> Dataset:
    return _GENERATORS[ReferenceType.parse(reference_type)](data, rng)


@dataclass(frozen=True, eq=False)
class ReferenceEnsemble:
    """Elbow statistics of N_R null references fitted exactly like the observed data.

    delta_matrix is N_R x (k_max-1) (columns k = 2..k_max); heterogeneity and inertia are
    N_R x (k_max+1) (columns k = 1..k_max+1); seeds[r] is the stream reference r was built from.
    """

    reference_type: ReferenceType
    method: ClusteringMethod
    k_max: int
    delta_matrix: np.ndarray
    heterogeneity: np.ndarray
    inertia: np.ndarray
    seeds: Tuple[RngSpec, ...]

    @property
    def n_ref(self) -> int:
        return self.delta_matrix.shape[0]

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(2, self.k_max + 1)

    def percentile(self, q: float) -> np.ndarray:
        """Per-k q-quantile (q in [0, 1]) of the reference elbow statistics"""
        if not 0 <= q <= 1:
            raise ConfigError(f"quantile level must lie in [0, 1], got {q}")
        return np.quantile(self.delta_matrix, q, axis=0)


def build_ensemble(
    data: Dataset,
    config: MethodConfig,
    k_max: int,
    n_ref: int,
    reference_type,
    rng: RngSpec,
    threads: Optional[int] = None,
) -> ReferenceEnsemble:
    """Generate and fit N_R references in parallel.

    Reference r draws its data from rng.derive(r).derive(0) and fits with rng.derive(r).derive(1),
    so the ensemble does not depend on the thread count.

    Args:
        data (Dataset): The observed data (sets the reference support)
        config (MethodConfig): Clustering method used for the observed data (its rng is replaced)
        k_max (int): Largest k tested
        n_ref (int): Number of references N_R (>= 2)
        reference_type (ReferenceType | str): bbox or pca
        rng (RngSpec): Stream the per-reference streams are derived from
        threads (int, optional): Worker threads

    Returns:
        ReferenceEnsemble: The stacked reference statistics
    """
    if n_ref < 2:
        raise ConfigError(f"n_ref must be >= 2, got {n_ref}")
    reference_type = ReferenceType.parse(reference_type)
    seeds = tuple(rng.derive(r) for r in range(n_ref))
    log.info(f"Building {n_ref} {reference_type.value} references ({config.method.value}, k_max={k_max})...")

    def fit_reference(r: int):
        with tagged("reference", index=r):
            reference = generate_reference(data, reference_type, seeds[r].derive(0))
            sequence = heterogeneity_sequence(reference, config.with_rng(seeds[r].derive(1)), k_max)
            log.debug(f"reference {r}: H_1={sequence.H[0]:.6g}")
            return sequence.H, sequence.inertia, elbow_sequence(sequence).delta

    rows = parallel_map(fit_reference, range(n_ref), threads)
    return ReferenceEnsemble(
        reference_type=reference_type,
        method=config.method,
        k_max=k_max,
        delta_matrix=np.array([row[2] for row in rows]),
        heterogeneity=np.array([row[0] for row in rows]),
        inertia=np.array([row[1] for row in rows]),
        seeds=seeds,
    )


if __name__ == "__main__":
    """Exercise the reference generators"""
    points = Dataset(np.random.default_rng(3).normal(size=(40, 3)))
    print(gen_bbox_uniform(points, RngSpec(1)))
    print(pca_frame(points).axes.round(3))
    ensemble = build_ensemble(points, MethodConfig(), 4, 5, "pca", RngSpec(1))
    print(ensemble.delta_matrix)
