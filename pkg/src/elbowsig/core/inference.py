"""Empirical p-values, subsampling threshold calibration, Benjamini-Hochberg FDR and the
significance report that ties the four steps of an ElbowSig analysis together"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

import numpy as np
import pandas as pd

from elbowsig.core.clustering import ClusteringMethod, HeterogeneitySequence, MethodConfig, heterogeneity_sequence
from elbowsig.core.data_model import Dataset, RngSpec
from elbowsig.core.elbow import ElbowSequence, elbow_sequence
from elbowsig.core.reference_gen import ReferenceEnsemble, ReferenceType, build_ensemble
from elbowsig.utils.error_utils import ConfigError, tag_errors, tagged
from elbowsig.utils.json_utils import dumps, utc_timestamp
from elbowsig.utils.parallel import parallel_map

log = logging.getLogger("elbowsig")

SCHEMA_VERSION = "elbowsig.report/1"
QUANTILE_SLACK = 1e-9
NO_STRUCTURE = "k = 1 (no structure)"

DEFAULT_K_MAX = 10
DEFAULT_N_REF = 200
DEFAULT_Q1 = 0.05
DEFAULT_Q2 = 0.05
DEFAULT_S_SIG = 50
DEFAULT_F_SEL = 0.5


@dataclass(frozen=True, eq=False)
class PValueSequence:
    """p_k for k = 2..k_max; with n_ref set, every p_k is a multiple of 1/n_ref"""

    k_values: np.ndarray
    p: np.ndarray
    n_ref: Optional[int] = None

    def __post_init__(self):
        k_values = np.asarray(self.k_values, dtype=int)
        p = np.asarray(self.p, dtype=np.float64)
        if k_values.shape != p.shape:
            raise ConfigError(f"{len(k_values)} k values for {len(p)} p-values")
        if np.any((p < 0) | (p > 1)):
            raise ConfigError("p-values must lie in [0, 1]")
        object.__setattr__(self, "k_values", k_values)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True, eq=False)
class ThresholdCalibration:
    """Per-scale thresholds p_thr(k; q1) and p_sig = min_k p_thr(k; q1)"""

    q1: float
    s_sig: int
    f_sel: float
    k_values: np.ndarray
    p_thr_per_k: np.ndarray
    p_sig: float


def validate_calibration(n_ref: int, q1: float, s_sig: int, f_sel: float):
    if int(n_ref) < 10:
        raise ConfigError(f"n_ref must be >= 10 for threshold calibration, got {n_ref}")
    if not 0 < q1 < 1:
        raise ConfigError(f"q1 must lie in (0, 1), got {q1}")
    if int(s_sig) < 1:
        raise ConfigError(f"s_sig must be >= 1, got {s_sig}")
    if not 0 < f_sel <= 1:
        raise ConfigError(f"f_sel must lie in (0, 1], got {f_sel}")
    if math.floor(f_sel * n_ref) < 1:
        raise ConfigError(f"f_sel * n_ref must select at least one reference (f_sel={f_sel}, n_ref={n_ref})")


def validate_levels(k_max: int, n_ref: int, q1: float, q2: float, s_sig: int, f_sel: float):
    """Check the analysis parameters before any fitting starts"""
    if int(k_max) < 2:
        raise ConfigError(f"k_max must be >= 2 (the elbow statistic needs k >= 2), got {k_max}")
    if not 0 < q2 < 1:
        raise ConfigError(f"q2 must lie in (0, 1), got {q2}")
    validate_calibration(n_ref, q1, s_sig, f_sel)


def empirical_pvalues(delta_data: ElbowSequence, ensemble: ReferenceEnsemble) -> PValueSequence:
    """p_k = #{r : delta_k^(r) >= delta_k^data} / N_R (ties count as exceedances)"""
    if not np.array_equal(delta_data.k_values, ensemble.k_values):
        raise ConfigError(
            f"k grid mismatch: data has k={delta_data.k_values.tolist()}, "
            f"references have k={ensemble.k_values.tolist()}"
        )
    exceedances = (ensemble.delta_matrix >= delta_data.delta[None, :]).sum(axis=0)
    return PValueSequence(delta_data.k_values, exceedances / ensemble.n_ref, n_ref=ensemble.n_ref)


def lower_quantile(values: np.ndarray, q: float) -> float:
    """The ceil(q*n)-th smallest value (1-indexed, clamped to [1, n])"""
    ordered = np.sort(values)
    rank = min(max(math.ceil(q * len(ordered) - QUANTILE_SLACK), 1), len(ordered))
    return float(ordered[rank - 1])


def leave_one_out_pvalues(sorted_column: np.ndarray, values: np.ndarray) -> np.ndarray:
    """For reference values taken from sorted_column: #{r != i : delta^(r) >= delta^(i)} / (N_R - 1)"""
    n_ref = len(sorted_column)
    at_least = n_ref - np.searchsorted(sorted_column, values, side="left")
    return (at_least - 1) / (n_ref - 1)


@tag_errors(stage="calibrate")
def calibrate_threshold(
    ensemble: ReferenceEnsemble,
    q1: float = DEFAULT_Q1,
    s_sig: int = DEFAULT_S_SIG,
    f_sel: float = DEFAULT_F_SEL,
    rng: Optional[RngSpec] = None,
    threads: Optional[int] = None,
) -> ThresholdCalibration:
    """Subsampling calibration of the per-scale threshold.

    Repetition s draws floor(f_sel*N_R) test references per k without replacement, computes their
    leave-one-out p-values against the full ensemble, and keeps the lower q1-quantile.
    p_thr(k) is the minimum over repetitions, p_sig the minimum over k.

    Args:
        ensemble (ReferenceEnsemble): The reference elbow statistics (N_R >= 10)
        q1 (float): Per-scale level in (0, 1)
        s_sig (int): Number of repetitions
        f_sel (float): Fraction of references used as test references, in (0, 1]
        rng (RngSpec, optional): Stream for the repetitions (repetition s uses rng.derive(s))
        threads (int, optional): Worker threads

    Returns:
        ThresholdCalibration: p_thr per k and p_sig
    """
    n_ref = ensemble.n_ref
    validate_calibration(n_ref, q1, s_sig, f_sel)
    rng = rng or RngSpec(0)
    n_sel = math.floor(f_sel * n_ref)
    sorted_columns = np.sort(ensemble.delta_matrix, axis=0)

    def repetition(s: int) -> np.ndarray:
        generator = rng.derive(s).generator()
        thresholds = np.empty(len(ensemble.k_values))
        for j in range(len(ensemble.k_values)):
            chosen = generator.choice(n_ref, size=n_sel, replace=False)
            loo = leave_one_out_pvalues(sorted_columns[:, j], ensemble.delta_matrix[chosen, j])
            thresholds[j] = lower_quantile(loo, q1)
        return thresholds

    per_repetition = np.array(parallel_map(repetition, range(s_sig), threads))
    p_thr = per_repetition.min(axis=0)
    calibration = ThresholdCalibration(q1, int(s_sig), float(f_sel), ensemble.k_values, p_thr, float(p_thr.min()))
    log.info(f"Calibrated p_sig={calibration.p_sig:.4g} (q1={q1}, S_sig={s_sig}, f_sel={f_sel}, N_R={n_ref})")
    return calibration


def bh_fdr(p_values: PValueSequence, q2: float) -> Set[int]:
    """Benjamini-Hochberg step-up: reject every k with p_k <= p_(i*), i* the largest rank with
    p_(i) <= q2 * i / m"""
    if not 0 < q2 < 1:
        raise ConfigError(f"q2 must lie in (0, 1), got {q2}")
    p = p_values.p
    m = len(p)
    if m == 0:
        return set()
    ordered = np.sort(p)
    passing = np.flatnonzero(ordered * m <= q2 * np.arange(1, m + 1))
    if len(passing) == 0:
        return set()
    cutoff = ordered[passing[-1]]
    return {int(k) for k, pk in zip(p_values.k_values, p) if pk <= cutoff}


def significance_band(ensemble: ReferenceEnsemble, p_sig: float) -> np.ndarray:
    """Per-k (1 - p_sig) quantile of the reference elbow statistics, the curve delta^data is read against"""
    return ensemble.percentile(1.0 - p_sig)


@dataclass(frozen=True, eq=False)
class SignificanceReport:
    """Everything one ElbowSig analysis produced, plus its provenance"""

    method: ClusteringMethod
    reference_type: ReferenceType
    n_ref: int
    k_max: int
    seeds: Dict[str, object]
    heterogeneity: HeterogeneitySequence
    delta_data: ElbowSequence
    p_values: PValueSequence
    calibration: ThresholdCalibration
    q2: float
    per_k_significant: Set[int]
    fdr_significant: Set[int]
    monotonicity_violations: List[int]
    band: np.ndarray
    method_config: Dict[str, object] = field(default_factory=dict)
    generated_at: Optional[str] = None

    @property
    def p_sig(self) -> float:
        return self.calibration.p_sig

    def selection_label(self, which: str = "per_k") -> str:
        chosen = self.per_k_significant if which == "per_k" else self.fdr_significant
        return ", ".join(f"k = {k}" for k in sorted(chosen)) if chosen else NO_STRUCTURE

    def to_dict(self, include_timestamp: bool = True) -> dict:
        calibration = self.calibration
        output = {
            "schema_version": SCHEMA_VERSION,
            "method": self.method.value,
            "reference_type": self.reference_type.value,
            "n_ref": self.n_ref,
            "k_max": self.k_max,
            "seeds": self.seeds,
            "method_config": self.method_config,
            "heterogeneity": {"k_values": self.heterogeneity.k_values, "H": self.heterogeneity.H},
            "delta_data": {
                "k_values": self.delta_data.k_values,
                "delta": self.delta_data.delta,
                "degenerate_flags": self.delta_data.degenerate_flags,
            },
            "p_values": {"k_values": self.p_values.k_values, "p": self.p_values.p},
            "calibration": {
                "q1": calibration.q1,
                "s_sig": calibration.s_sig,
                "f_sel": calibration.f_sel,
                "k_values": calibration.k_values,
                "p_thr_per_k": calibration.p_thr_per_k,
                "p_sig": calibration.p_sig,
            },
            "q2": self.q2,
            "per_k_significant": set(self.per_k_significant),
            "fdr_significant": set(self.fdr_significant),
            "monotonicity_violations": list(self.monotonicity_violations),
            "band": self.band,
            "local_maxima": self.delta_data.local_maxima(),
        }
        if include_timestamp:
            output["generated_at"] = self.generated_at
        return output

    def to_json(self, include_timestamp: bool = True) -> str:
        return dumps(self.to_dict(include_timestamp=include_timestamp))

    @classmethod
    def from_dict(cls, payload: dict) -> "SignificanceReport":
        if payload.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported report schema {payload.get('schema_version')!r}")
        method = ClusteringMethod.parse(payload["method"])
        heterogeneity = payload["heterogeneity"]
        delta = payload["delta_data"]
        calibration = payload["calibration"]
        return cls(
            method=method,
            reference_type=ReferenceType.parse(payload["reference_type"]),
            n_ref=int(payload["n_ref"]),
            k_max=int(payload["k_max"]),
            seeds=dict(payload["seeds"]),
            heterogeneity=HeterogeneitySequence(method, heterogeneity["k_values"], heterogeneity["H"]),
            delta_data=ElbowSequence(delta["k_values"], delta["delta"], delta["degenerate_flags"]),
            p_values=PValueSequence(payload["p_values"]["k_values"], payload["p_values"]["p"], int(payload["n_ref"])),
            calibration=ThresholdCalibration(
                float(calibration["q1"]),
                int(calibration["s_sig"]),
                float(calibration["f_sel"]),
                np.asarray(calibration["k_values"], dtype=int),
                np.asarray(calibration["p_thr_per_k"], dtype=np.float64),
                float(calibration["p_sig"]),
            ),
            q2=float(payload["q2"]),
            per_k_significant={int(k) for k in payload["per_k_significant"]},
            fdr_significant={int(k) for k in payload["fdr_significant"]},
            monotonicity_violations=[int(k) for k in payload["monotonicity_violations"]],
            band=np.asarray(payload["band"], dtype=np.float64),
            method_config=dict(payload.get("method_config", {})),
            generated_at=payload.get("generated_at"),
        )

    def to_tidy_frame(self) -> pd.DataFrame:
        """One row per k = 1..k_max+1: k, H, delta, p, significant_per_k, significant_fdr
        (delta and p are NaN where they are undefined)"""
        df = pd.DataFrame({"k": self.heterogeneity.k_values, "H": self.heterogeneity.H})
        scale = pd.DataFrame({"k": self.delta_data.k_values, "delta": self.delta_data.delta, "p": self.p_values.p})
        df = df.merge(scale, on="k", how="left")
        df["significant_per_k"] = df["k"].isin(self.per_k_significant)
        df["significant_fdr"] = df["k"].isin(self.fdr_significant)
        return df

    def summary_frame(self) -> pd.DataFrame:
        """Human-readable table for k = 2..k_max ('*' per-k significant, '+' FDR significant)"""
        df = self.to_tidy_frame()
        df = df[df["k"].between(2, self.k_max)].copy()
        df["per_k"] = np.where(df["significant_per_k"], "*", "")
        df["fdr"] = np.where(df["significant_fdr"], "+", "")
        return df[["k", "H", "delta", "p", "per_k", "fdr"]].reset_index(drop=True)

    def summary_text(self) -> str:
        lines = [
            f"method={self.method.value} reference={self.reference_type.value} N_R={self.n_ref} "
            f"p_sig={self.p_sig:.4g} q2={self.q2}",
            self.summary_frame().to_string(index=False, float_format=lambda v: f"{v:.6g}"),
            f"per-k significant (*): {self.selection_label('per_k')}",
            f"FDR significant (+):   {self.selection_label('fdr')}",
        ]
        if self.monotonicity_violations:
            lines.append(f"H increases after k = {self.monotonicity_violations}")
        return "\n".join(lines)


def observed_sequence(data: Dataset, config: MethodConfig, k_max: int, rng: RngSpec) -> HeterogeneitySequence:
    """Heterogeneities of the observed data (fit streams come from rng.derive(0))"""
    if k_max + 1 > data.n:
        raise ConfigError(f"k_max + 1 = {k_max + 1} exceeds the number of observations N={data.n}")
    with tagged("observed"):
        return heterogeneity_sequence(data, config.with_rng(rng.derive(0)), k_max)


def assemble_report(
    sequence: HeterogeneitySequence,
    ensemble: ReferenceEnsemble,
    config: MethodConfig,
    rng: RngSpec,
    q1: float = DEFAULT_Q1,
    q2: float = DEFAULT_Q2,
    s_sig: int = DEFAULT_S_SIG,
    f_sel: float = DEFAULT_F_SEL,
    threads: Optional[int] = None,
) -> SignificanceReport:
    """Steps 3 and 4: p-values, calibrated threshold, per-k and FDR sets"""
    delta_data = elbow_sequence(sequence)
    p_values = empirical_pvalues(delta_data, ensemble)
    with tagged("calibration"):
        calibration = calibrate_threshold(ensemble, q1, s_sig, f_sel, rng.derive(2), threads)
    per_k = {int(k) for k, p in zip(p_values.k_values, p_values.p) if p < calibration.p_sig}
    fdr = bh_fdr(p_values, q2)

    violations = sequence.monotonicity_violations
    if config.method.is_hard and violations:
        log.warning(f"{config.method.value}: observed H increases after k={violations} (local optima)")

    report = SignificanceReport(
        method=config.method,
        reference_type=ensemble.reference_type,
        n_ref=ensemble.n_ref,
        k_max=ensemble.k_max,
        seeds={
            "master_seed": rng.master_seed,
            "stream_id": rng.stream_id,
            "reference_streams": [seed.stream_id for seed in ensemble.seeds],
        },
        heterogeneity=sequence,
        delta_data=delta_data,
        p_values=p_values,
        calibration=calibration,
        q2=q2,
        per_k_significant=per_k,
        fdr_significant=fdr,
        monotonicity_violations=violations,
        band=significance_band(ensemble, calibration.p_sig),
        method_config={
            "fuzzifier": config.fuzzifier,
            "max_iter": config.max_iter,
            "tol": config.tol,
            "n_init": config.n_init,
            "covariance_reg": config.covariance_reg,
        },
        generated_at=utc_timestamp(),
    )
    log.important(f"Per-k significant: {report.selection_label('per_k')}; FDR: {report.selection_label('fdr')}")
    return report


def analyze(
    data: Dataset,
    config: MethodConfig,
    k_max: int = DEFAULT_K_MAX,
    n_ref: int = DEFAULT_N_REF,
    reference_type=ReferenceType.PCA,
    q1: float = DEFAULT_Q1,
    q2: float = DEFAULT_Q2,
    rng: Optional[RngSpec] = None,
    s_sig: int = DEFAULT_S_SIG,
    f_sel: float = DEFAULT_F_SEL,
    threads: Optional[int] = None,
) -> SignificanceReport:
    """Run an ElbowSig analysis end to end.

    Args:
        data (Dataset): The observed data
        config (MethodConfig): Clustering method and knobs
        k_max (int): Largest number of clusters tested (>= 2, k_max + 1 <= N)
        n_ref (int): Number of null references N_R
        reference_type (ReferenceType | str): bbox or pca
        q1 (float): Per-scale level
        q2 (float): FDR level
        rng (RngSpec, optional): Master stream (defaults to config.rng)
        s_sig (int): Calibration repetitions
        f_sel (float): Calibration subsample fraction
        threads (int, optional): Worker threads

    Returns:
        SignificanceReport: p-values, threshold, significant sets and provenance
    """
    validate_levels(k_max, n_ref, q1, q2, s_sig, f_sel)
    reference_type = ReferenceType.parse(reference_type)
    rng = rng or config.rng
    log.info(f"ElbowSig on {data}: {config.method.value}, {reference_type.value} references, k_max={k_max}")

    sequence = observed_sequence(data, config, k_max, rng)
    ensemble = build_ensemble(data, config, k_max, n_ref, reference_type, rng.derive(1), threads)
    return assemble_report(sequence, ensemble, config, rng, q1, q2, s_sig, f_sel, threads)


if __name__ == "__main__":
    """Exercise an analysis on two separated blobs"""
    generator = np.random.default_rng(0)
    blobs = np.concatenate([generator.normal(-10, 0.1, 50), generator.normal(10, 0.1, 50)])
    result = analyze(Dataset(blobs), MethodConfig(rng=RngSpec(7)), k_max=5, n_ref=50, s_sig=10)
    print(result.summary_text())
