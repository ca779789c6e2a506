"""Clustering backends (Ward agglomerative, k-means, fuzzy c-means, Gaussian mixture EM)
and the heterogeneity H_k each one induces"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import cut_tree, linkage
from scipy.spatial.distance import cdist
from scipy.special import logsumexp
from sklearn.cluster import kmeans_plusplus

from elbowsig.core.data_model import Dataset, RngSpec
from elbowsig.utils.error_utils import ConfigError, NumericalError, tagged

log = logging.getLogger("elbowsig")

LOG_2PI = np.log(2.0 * np.pi)


class ClusteringMethod(str, Enum):
    AGGLOMERATIVE = "agglomerative"
    KMEANS = "kmeans"
    FCM = "fcm"
    GMM = "gmm"

    @property
    def is_hard(self) -> bool:
        return self in (ClusteringMethod.AGGLOMERATIVE, ClusteringMethod.KMEANS)

    @classmethod
    def parse(cls, value) -> "ClusteringMethod":
        try:
            return cls(str(getattr(value, "value", value)).lower())
        except ValueError:
            raise ConfigError(f"unknown clustering method {value!r}; choose from {[m.value for m in cls]}")


@dataclass(frozen=True)
class MethodConfig:
    """Clustering method plus its knobs.

    covariance_reg=None means 1e-6 times the mean feature variance of the data being fitted.
    """

    method: ClusteringMethod = ClusteringMethod.KMEANS
    fuzzifier: float = 2.0
    max_iter: int = 300
    tol: float = 1e-6
    n_init: int = 1
    covariance_reg: Optional[float] = None
    rng: RngSpec = field(default_factory=lambda: RngSpec(0))

    def __post_init__(self):
        object.__setattr__(self, "method", ClusteringMethod.parse(self.method))
        if self.method is ClusteringMethod.FCM and not self.fuzzifier > 1:
            raise ConfigError(f"FCM fuzzifier m must be > 1, got {self.fuzzifier}")
        if int(self.max_iter) < 1:
            raise ConfigError(f"max_iter must be positive, got {self.max_iter}")
        if int(self.n_init) < 1:
            raise ConfigError(f"n_init must be positive, got {self.n_init}")
        if not self.tol >= 0:
            raise ConfigError(f"tol must be nonnegative, got {self.tol}")
        if self.covariance_reg is not None and not self.covariance_reg > 0:
            raise ConfigError(f"covariance_reg must be > 0, got {self.covariance_reg}")
        if not isinstance(self.rng, RngSpec):
            raise ConfigError(f"rng must be an RngSpec, got {type(self.rng).__name__}")

    def with_rng(self, rng: RngSpec) -> "MethodConfig":
        return replace(self, rng=rng)

    def resolve_covariance_reg(self, data: Dataset) -> float:
        if self.covariance_reg is not None:
            return float(self.covariance_reg)
        mean_variance = float(data.values.var(axis=0).mean())
        return 1e-6 * mean_variance if mean_variance > 0 else 1e-6


@dataclass(frozen=True, eq=False)
class ClusteringOutcome:
    """One (method, k) fit.

    hard_labels are argmax labels for FCM/GMM. heterogeneity is the method's H_k;
    for GMM it is the total negative log-likelihood and may be negative.
    objective_history is the per-iteration inertia / J_m / log-likelihood of the returned run.
    """

    method: ClusteringMethod
    k: int
    hard_labels: np.ndarray
    heterogeneity: float
    centroids: Optional[np.ndarray] = None
    memberships: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    means: Optional[np.ndarray] = None
    covariances: Optional[np.ndarray] = None
    objective_history: Tuple[float, ...] = ()
    n_iter: int = 0
    converged: bool = True


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Ward merge tree in scipy linkage layout: rows (a, b, height, size), N-1 rows"""

    linkage: np.ndarray
    n_leaves: int

    @property
    def heights(self) -> np.ndarray:
        return self.linkage[:, 2]

    @property
    def merges(self) -> List[Tuple[int, int]]:
        return [(int(a), int(b)) for a, b in self.linkage[:, :2]]


@dataclass(frozen=True, eq=False)
class HeterogeneitySequence:
    """H_k for k = 1..k_max+1, plus W_k (inertia of the hard labels) for the gap statistic"""

    method: ClusteringMethod
    k_values: np.ndarray
    H: np.ndarray
    inertia: Optional[np.ndarray] = None

    def __post_init__(self):
        k_values = np.asarray(self.k_values, dtype=int)
        H = np.asarray(self.H, dtype=np.float64)
        if k_values.shape != H.shape:
            raise ConfigError(f"{len(k_values)} k values for {len(H)} heterogeneities")
        object.__setattr__(self, "k_values", k_values)
        object.__setattr__(self, "H", H)
        if self.inertia is not None:
            object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=np.float64))

    @classmethod
    def from_values(cls, H: Iterable[float], method=ClusteringMethod.KMEANS) -> "HeterogeneitySequence":
        H = np.asarray(list(H), dtype=np.float64)
        return cls(ClusteringMethod.parse(method), np.arange(1, len(H) + 1), H)

    @property
    def k_max(self) -> int:
        return int(self.k_values[-1]) - 1

    @property
    def monotonicity_violations(self) -> List[int]:
        """k at which Delta H_k = H_{k+1} - H_k > 0 (recorded, never repaired)"""
        delta = np.diff(self.H)
        return [int(k) for k, d in zip(self.k_values[:-1], delta) if d > 0]


def _check_k(data: Dataset, k: int):
    if not 1 <= k <= data.n:
        raise ConfigError(f"k must lie in [1, N={data.n}], got {k}")


def cluster_means(X: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Mean of every cluster 0..k-1 (rows of empty clusters are left at zero)"""
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    return sums / np.maximum(counts, 1.0)[:, None]


def inertia(data: Dataset, labels: np.ndarray) -> float:
    """Within-cluster sum of squared distances to the cluster means"""
    labels = np.asarray(labels)
    _, labels = np.unique(labels, return_inverse=True)
    X = data.values
    centers = cluster_means(X, labels, int(labels.max()) + 1)
    return float(((X - centers[labels]) ** 2).sum())


def _relative_change(previous: float, current: float) -> float:
    return abs(previous - current) / max(abs(previous), np.finfo(np.float64).tiny)


# Agglomerative (Ward)
def ward_dendrogram(data: Dataset) -> Dendrogram:
    """Greedy Ward merges (Lance-Williams updates); heights are non-decreasing"""
    return Dendrogram(linkage(data.values, method="ward", metric="euclidean"), data.n)


def cut_dendrogram(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Labels 0..k-1 obtained by undoing the last k-1 merges"""
    if not 1 <= k <= dendrogram.n_leaves:
        raise ConfigError(f"cannot cut {dendrogram.n_leaves} leaves into k={k} clusters")
    groups = cut_tree(dendrogram.linkage, n_clusters=[k])[:, 0]
    _, labels = np.unique(groups, return_inverse=True)
    return labels


def agglomerative(data: Dataset, k: int, dendrogram: Optional[Dendrogram] = None) -> ClusteringOutcome:
    """Ward partition at k; H_k is the inertia about the recomputed cluster means"""
    _check_k(data, k)
    dendrogram = dendrogram or ward_dendrogram(data)
    labels = cut_dendrogram(dendrogram, k)
    centers = cluster_means(data.values, labels, k)
    h = float(((data.values - centers[labels]) ** 2).sum())
    return ClusteringOutcome(ClusteringMethod.AGGLOMERATIVE, k, labels, h, centroids=centers)


# k-means
def _assign(X: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    d2 = cdist(X, centers, "sqeuclidean")
    labels = d2.argmin(axis=1)
    return labels, d2[np.arange(len(X)), labels]


def _repair_empty(X, labels, centers, d2, k):
    """Move each empty cluster's centroid onto the point farthest from its own centroid"""
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        candidates = counts[labels] > 1
        i = int(np.argmax(np.where(candidates, d2, -1.0)))
        counts[labels[i]] -= 1
        counts[j] = 1
        labels[i] = j
        centers[j] = X[i]
        d2[i] = 0.0
    return labels, centers, d2


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    k = len(centers)
    centers = centers.copy()
    labels, d2 = _assign(X, centers)
    labels, centers, d2 = _repair_empty(X, labels, centers, d2, k)
    history = [float(d2.sum())]
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        centers = cluster_means(X, labels, k)
        new_labels, d2 = _assign(X, centers)
        new_labels, centers, d2 = _repair_empty(X, new_labels, centers, d2, k)
        history.append(float(d2.sum()))
        unchanged = np.array_equal(new_labels, labels)
        labels = new_labels
        if unchanged or _relative_change(history[-2], history[-1]) < tol:
            converged = True
            break

    centers = cluster_means(X, labels, k)
    h = float(((X - centers[labels]) ** 2).sum())
    if h < history[-1]:
        history.append(h)
    return labels, centers, h, history, n_iter, converged


def _seed_centers(X: np.ndarray, k: int, generator: np.random.Generator) -> np.ndarray:
    centers, _ = kmeans_plusplus(X, n_clusters=k, random_state=int(generator.integers(2**31 - 1)))
    return centers


def kmeans(data: Dataset, k: int, config: MethodConfig) -> ClusteringOutcome:
    """Lloyd iterations from k-means++ seeding; best of n_init runs by inertia"""
    _check_k(data, k)
    X = np.array(data.values)
    generator = config.rng.generator()
    best = None
    for _ in range(config.n_init):
        run = _lloyd(X, _seed_centers(X, k, generator), config.max_iter, config.tol)
        if best is None or run[2] < best[2]:
            best = run
    labels, centers, h, history, n_iter, converged = best
    return ClusteringOutcome(
        ClusteringMethod.KMEANS,
        k,
        labels,
        h,
        centroids=centers,
        objective_history=tuple(history),
        n_iter=n_iter,
        converged=converged,
    )


# Fuzzy c-means
def fcm_memberships(X: np.ndarray, centers: np.ndarray, m: float) -> np.ndarray:
    """w_ij = 1 / sum_l (||x_i - mu_j|| / ||x_i - mu_l||)^(2/(m-1)); a point sitting on a
    centroid is crisp there (split evenly between coincident centroids)"""
    d2 = cdist(X, centers, "sqeuclidean")
    zero = d2 == 0.0
    crisp = zero.any(axis=1)
    w = np.empty_like(d2)
    if (~crisp).any():
        d2_soft = d2[~crisp]
        ratio = d2_soft / d2_soft.min(axis=1, keepdims=True)
        inverse = ratio ** (-1.0 / (m - 1.0))
        w[~crisp] = inverse / inverse.sum(axis=1, keepdims=True)
    if crisp.any():
        hits = zero[crisp].astype(np.float64)
        w[crisp] = hits / hits.sum(axis=1, keepdims=True)
    return w


def fcm_objective(X: np.ndarray, centers: np.ndarray, w: np.ndarray, m: float) -> float:
    return float((w**m * cdist(X, centers, "sqeuclidean")).sum())


def _fcm_run(X: np.ndarray, centers: np.ndarray, m: float, max_iter: int, tol: float):
    w = fcm_memberships(X, centers, m)
    history = [fcm_objective(X, centers, w, m)]
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        wm = w**m
        mass = wm.sum(axis=0)
        live = mass > 0
        centers = centers.copy()
        centers[live] = (wm.T @ X)[live] / mass[live, None]
        w = fcm_memberships(X, centers, m)
        history.append(fcm_objective(X, centers, w, m))
        if _relative_change(history[-2], history[-1]) < tol:
            converged = True
            break
    return w, centers, history[-1], history, n_iter, converged


def fcm(data: Dataset, k: int, config: MethodConfig) -> ClusteringOutcome:
    """Fuzzy c-means by alternating membership / centroid updates; H_k = J_m"""
    _check_k(data, k)
    m = float(config.fuzzifier)
    if not m > 1:
        raise ConfigError(f"FCM fuzzifier m must be > 1, got {m}")
    X = np.array(data.values)
    generator = config.rng.generator()
    best = None
    for _ in range(config.n_init):
        run = _fcm_run(X, _seed_centers(X, k, generator), m, config.max_iter, config.tol)
        if best is None or run[2] < best[2]:
            best = run
    w, centers, h, history, n_iter, converged = best
    return ClusteringOutcome(
        ClusteringMethod.FCM,
        k,
        w.argmax(axis=1),
        h,
        centroids=centers,
        memberships=w,
        objective_history=tuple(history),
        n_iter=n_iter,
        converged=converged,
    )


# Gaussian mixture (full covariance EM)
def _gmm_m_step(X: np.ndarray, resp: np.ndarray, reg: float):
    n, d = X.shape
    nk = resp.sum(axis=0) + 10 * np.finfo(np.float64).eps
    weights = nk / nk.sum()
    weights /= weights.sum()
    means = (resp.T @ X) / nk[:, None]
    covariances = np.empty((len(nk), d, d))
    for j in range(len(nk)):
        diff = X - means[j]
        cov = (resp[:, j, None] * diff).T @ diff / nk[j]
        cov = 0.5 * (cov + cov.T)
        cov.flat[:: d + 1] += reg
        covariances[j] = cov
    return weights, means, covariances


def gmm_log_prob(X: np.ndarray, weights, means, covariances) -> np.ndarray:
    """N x k matrix of ln(pi_j) + ln phi(x_i | mu_j, Sigma_j)"""
    n, d = X.shape
    log_prob = np.empty((n, len(weights)))
    for j, (mu, cov) in enumerate(zip(means, covariances)):
        try:
            chol = scipy.linalg.cholesky(cov, lower=True)
        except scipy.linalg.LinAlgError:
            raise NumericalError(f"covariance of component {j} is numerically singular")
        solved = scipy.linalg.solve_triangular(chol, (X - mu).T, lower=True)
        log_det = 2.0 * np.log(np.diag(chol)).sum()
        log_prob[:, j] = -0.5 * (d * LOG_2PI + log_det + (solved**2).sum(axis=0)) + np.log(weights[j])
    return log_prob


def gmm_em(data: Dataset, k: int, config: MethodConfig) -> ClusteringOutcome:
    """Full-covariance EM initialised from a k-means fit; H_k = total negative log-likelihood"""
    _check_k(data, k)
    X = np.array(data.values)
    reg = config.resolve_covariance_reg(data)
    init = kmeans(data, k, replace(config, method=ClusteringMethod.KMEANS, rng=config.rng.derive(0)))
    resp = np.eye(k)[init.hard_labels]

    weights, means, covariances = _gmm_m_step(X, resp, reg)
    log_prob = gmm_log_prob(X, weights, means, covariances)
    log_norm = logsumexp(log_prob, axis=1)
    history = [float(log_norm.sum())]
    converged = False
    n_iter = 0
    for n_iter in range(1, config.max_iter + 1):
        resp = np.exp(log_prob - log_norm[:, None])
        weights, means, covariances = _gmm_m_step(X, resp, reg)
        log_prob = gmm_log_prob(X, weights, means, covariances)
        log_norm = logsumexp(log_prob, axis=1)
        history.append(float(log_norm.sum()))
        if _relative_change(history[-2], history[-1]) < config.tol:
            converged = True
            break

    if not converged:
        log.debug(f"GMM k={k} stopped at max_iter={config.max_iter} without converging")
    return ClusteringOutcome(
        ClusteringMethod.GMM,
        k,
        log_prob.argmax(axis=1),
        -history[-1],
        weights=weights,
        means=means,
        covariances=covariances,
        objective_history=tuple(history),
        n_iter=n_iter,
        converged=converged,
    )


_FITTERS = {
    ClusteringMethod.KMEANS: kmeans,
    ClusteringMethod.FCM: fcm,
    ClusteringMethod.GMM: gmm_em,
}


def fit(data: Dataset, k: int, config: MethodConfig) -> ClusteringOutcome:
    """Fit config.method at k clusters"""
    if config.method is ClusteringMethod.AGGLOMERATIVE:
        return agglomerative(data, k)
    return _FITTERS[config.method](data, k, config)


def fit_sequence(data: Dataset, config: MethodConfig, k_values: Iterable[int]) -> List[ClusteringOutcome]:
    """One fit per k (one shared dendrogram for agglomerative, one RNG stream per k otherwise)"""
    k_values = [int(k) for k in k_values]
    if config.method is ClusteringMethod.AGGLOMERATIVE:
        dendrogram = ward_dendrogram(data)
        outcomes = []
        for k in k_values:
            with tagged("fit", method=config.method.value, k=k):
                outcomes.append(agglomerative(data, k, dendrogram))
        return outcomes

    outcomes = []
    for k in k_values:
        with tagged("fit", method=config.method.value, k=k):
            outcomes.append(fit(data, k, config.with_rng(config.rng.derive(k))))
    return outcomes


def heterogeneity_sequence(data: Dataset, config: MethodConfig, k_max: int) -> HeterogeneitySequence:
    """H_k for k = 1..k_max+1 (the extra point makes delta_{k_max} defined)"""
    if k_max < 1 or k_max + 1 > data.n:
        raise ConfigError(f"k_max must satisfy 1 <= k_max and k_max + 1 <= N={data.n}, got {k_max}")
    return sequence_from_outcomes(data, fit_sequence(data, config, range(1, k_max + 2)))


def sequence_from_outcomes(data: Dataset, outcomes: List[ClusteringOutcome]) -> HeterogeneitySequence:
    """Collect H_k (and W_k of the hard labels) from fits at consecutive k = 1, 2, ..."""
    method = outcomes[0].method
    H = [o.heterogeneity for o in outcomes]
    W = H if method.is_hard else [inertia(data, o.hard_labels) for o in outcomes]
    sequence = HeterogeneitySequence(method, [o.k for o in outcomes], H, inertia=W)
    if method.is_hard and sequence.monotonicity_violations:
        log.debug(f"{method.value}: H increases after k={sequence.monotonicity_violations}")
    return sequence


if __name__ == "__main__":
    """Exercise the clustering backends"""
    points = Dataset(np.array([[0.0], [1.0], [10.0], [11.0]]))
    for method in ClusteringMethod:
        cfg = MethodConfig(method=method, rng=RngSpec(7))
        print(method.value, heterogeneity_sequence(points, cfg, 2).H)
