"""Synthetic data generators and the table/scaling experiment harnesses"""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats

from elbowsig.core.baselines import ValidityIndex, gap_from_inertia, index_curve
from elbowsig.core.clustering import (
    ClusteringMethod,
    MethodConfig,
    fit_sequence,
    heterogeneity_sequence,
    sequence_from_outcomes,
)
from elbowsig.core.data_model import CSV_FLOAT_FORMAT, Dataset, RngSpec
from elbowsig.core.elbow import elbow_sequence
from elbowsig.core.inference import (
    DEFAULT_F_SEL,
    DEFAULT_K_MAX,
    DEFAULT_N_REF,
    DEFAULT_Q1,
    DEFAULT_Q2,
    DEFAULT_S_SIG,
    assemble_report,
    validate_levels,
)
from elbowsig.core.reference_gen import ReferenceType, build_ensemble
from elbowsig.core.theory import predicted_delta_large_n
from elbowsig.utils.error_utils import ConfigError, ElbowSigError, tagged
from elbowsig.utils.json_utils import dumps, utc_timestamp
from elbowsig.utils.parallel import parallel_map

log = logging.getLogger("elbowsig")

FAILURE_TOLERANCE = 0.01
SELECTORS = ("gap", "ch", "db", "silhouette")


class UnstructuredKind(str, Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"

    @classmethod
    def parse(cls, value) -> "UnstructuredKind":
        aliases = {"uniformbox01": cls.UNIFORM, "gaussianiso": cls.GAUSSIAN}
        text = str(getattr(value, "value", value)).lower()
        if text in aliases:
            return aliases[text]
        try:
            return cls(text)
        except ValueError:
            raise ConfigError(f"unknown unstructured kind {value!r}; choose from {[k.value for k in cls]}")


@dataclass(frozen=True)
class BlobSpec:
    """M isotropic Gaussian components with centres uniform in [-box_halfwidth, box_halfwidth]^D"""

    n: int
    d: int
    m: int
    sigma_c: float
    box_halfwidth: float = 10.0
    rng: RngSpec = field(default_factory=lambda: RngSpec(0))

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError(f"BlobSpec needs M >= 1 components, got {self.m}")
        if not self.sigma_c > 0:
            raise ConfigError(f"BlobSpec needs sigma_c > 0, got {self.sigma_c}")
        if self.n < self.m:
            raise ConfigError(f"BlobSpec needs N >= M, got N={self.n}, M={self.m}")
        if self.d < 1 or not self.box_halfwidth > 0:
            raise ConfigError(f"BlobSpec needs D >= 1 and box_halfwidth > 0, got D={self.d}")


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Generated data with its true component labels (labels are for diagnostics only)"""

    data: Dataset
    labels: np.ndarray
    centers: np.ndarray


def gen_blobs(spec: BlobSpec) -> LabeledDataset:
    """Uniform-multinomial component assignment, then N(center, sigma_c^2 I) per point"""
    generator = spec.rng.generator()
    centers = generator.uniform(-spec.box_halfwidth, spec.box_halfwidth, size=(spec.m, spec.d))
    labels = generator.integers(spec.m, size=spec.n)
    values = centers[labels] + spec.sigma_c * generator.standard_normal((spec.n, spec.d))
    return LabeledDataset(Dataset(values), labels, centers)


def gen_unstructured(n: int, d: int, kind, sigma: float = 1.0, rng: Optional[RngSpec] = None) -> Dataset:
    """i.i.d. rows from Uniform([0,1]^D) or N(0, sigma^2 I)"""
    kind = UnstructuredKind.parse(kind)
    if n < 2 or d < 1:
        raise ConfigError(f"unstructured data needs N >= 2 and D >= 1, got N={n}, D={d}")
    generator = (rng or RngSpec(0)).generator()
    if kind is UnstructuredKind.UNIFORM:
        return Dataset(generator.random((n, d)))
    if not sigma > 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    return Dataset(sigma * generator.standard_normal((n, d)))


def _as_tuple(value) -> Tuple[str, ...]:
    if isinstance(value, str):
        return (value,)
    return tuple(value)


@dataclass(frozen=True)
class ExperimentDesign:
    """One table of replicated analyses (flat TOML keys are the field names)"""

    name: str = "experiment"
    replicates: int = 100
    generator: str = "blobs"
    n: int = 200
    d: int = 5
    m: int = 3
    sigma_c: float = 1.0
    box_halfwidth: float = 10.0
    sigma: float = 1.0
    methods: Tuple[str, ...] = ("agglomerative",)
    reference_types: Tuple[str, ...] = ("pca",)
    selectors: Tuple[str, ...] = SELECTORS
    k_max: int = DEFAULT_K_MAX
    n_ref: int = DEFAULT_N_REF
    q1: float = DEFAULT_Q1
    q2: float = DEFAULT_Q2
    s_sig: int = DEFAULT_S_SIG
    f_sel: float = DEFAULT_F_SEL
    fuzzifier: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if int(self.replicates) < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.generator not in ("blobs", "uniform", "gaussian"):
            raise ConfigError(f"generator must be blobs, uniform or gaussian, got {self.generator!r}")
        methods = tuple(ClusteringMethod.parse(m).value for m in _as_tuple(self.methods))
        references = tuple(ReferenceType.parse(r).value for r in _as_tuple(self.reference_types))
        selectors = tuple(str(s).lower() for s in _as_tuple(self.selectors))
        unknown = sorted(set(selectors) - set(SELECTORS))
        if unknown:
            raise ConfigError(f"unknown selectors {unknown}; choose from {list(SELECTORS)}")
        if not methods or not references:
            raise ConfigError("a design needs at least one method and one reference type")
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "reference_types", references)
        object.__setattr__(self, "selectors", selectors)

        validate_levels(self.k_max, self.n_ref, self.q1, self.q2, self.s_sig, self.f_sel)
        if self.k_max + 1 > self.n:
            raise ConfigError(f"k_max + 1 = {self.k_max + 1} exceeds n={self.n}")
        if not self.fuzzifier > 1:
            raise ConfigError(f"fuzzifier must be > 1, got {self.fuzzifier}")
        RngSpec(self.seed)
        if self.generator == "blobs":
            self.blob_spec(RngSpec(self.seed))

    def blob_spec(self, rng: RngSpec) -> BlobSpec:
        return BlobSpec(self.n, self.d, self.m, self.sigma_c, self.box_halfwidth, rng)

    def make_data(self, rng: RngSpec) -> Dataset:
        if self.generator == "blobs":
            return gen_blobs(self.blob_spec(rng)).data
        return gen_unstructured(self.n, self.d, self.generator, self.sigma, rng)

    def method_config(self, method: str) -> MethodConfig:
        return MethodConfig(method=method, fuzzifier=self.fuzzifier)

    def plan(self) -> dict:
        """Planned work: replicates and clustering-sequence fits"""
        analyses = len(self.methods) * len(self.reference_types)
        return {
            "name": self.name,
            "replicates": self.replicates,
            "analyses_per_replicate": analyses,
            "sequence_fits": self.replicates * (len(self.methods) + analyses * self.n_ref),
        }

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScalingDesign:
    """Mean and variance of delta_{k_probe} on uniform data across dimensions"""

    name: str = "scaling"
    n: int = 30
    k_probe: int = 3
    methods: Tuple[str, ...] = ("agglomerative", "kmeans", "fcm", "gmm")
    dims: Tuple[int, ...] = (8, 16, 32, 64, 128)
    n_ref: int = 200
    fuzzifier: float = 2.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(ClusteringMethod.parse(m).value for m in _as_tuple(self.methods)))
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 3 or min(dims) < 1 or max(dims) < 10 * min(dims):
            raise ConfigError(f"dims needs >= 3 positive values spanning at least one decade, got {list(dims)}")
        if self.k_probe < 2 or self.k_probe + 1 > self.n:
            raise ConfigError(f"k_probe must satisfy 2 <= k_probe and k_probe + 1 <= n, got {self.k_probe}")
        if self.n_ref < 2:
            raise ConfigError(f"n_ref must be >= 2, got {self.n_ref}")
        if not self.fuzzifier > 1:
            raise ConfigError(f"fuzzifier must be > 1, got {self.fuzzifier}")
        RngSpec(self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class ScalingResult:
    """Rows (method, D, mean_delta, var_delta, n_valid) and the log-log slope of var vs D per method"""

    design: Dict[str, object]
    frame: pd.DataFrame
    slopes: Dict[str, float]

    def to_dict(self) -> dict:
        return {"design": self.design, "scaling": self.frame, "slopes": self.slopes}


@dataclass(frozen=True)
class SampleSizeDesign:
    """delta_k and H_k for k = 2..k_max on uniform [0,1]^d data across sample sizes"""

    name: str = "sample_size"
    d: int = 1
    ns: Tuple[int, ...] = (100, 300, 1000, 3000)
    k_max: int = 20
    methods: Tuple[str, ...] = ("kmeans",)
    n_ref: int = 100
    n_init: int = 1
    fuzzifier: float = 2.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(ClusteringMethod.parse(m).value for m in _as_tuple(self.methods)))
        ns = tuple(int(n) for n in self.ns)
        object.__setattr__(self, "ns", ns)
        if len(ns) < 3 or min(ns) < 2 or max(ns) < 10 * min(ns):
            raise ConfigError(f"ns needs >= 3 sample sizes spanning at least one decade, got {list(ns)}")
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if self.k_max < 2 or self.k_max + 1 > min(ns):
            raise ConfigError(f"k_max must satisfy 2 <= k_max and k_max + 1 <= min(ns)={min(ns)}, got {self.k_max}")
        if self.n_ref < 2:
            raise ConfigError(f"n_ref must be >= 2, got {self.n_ref}")
        if self.n_init < 1:
            raise ConfigError(f"n_init must be >= 1, got {self.n_init}")
        if not self.fuzzifier > 1:
            raise ConfigError(f"fuzzifier must be > 1, got {self.fuzzifier}")
        RngSpec(self.seed)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SampleSizeResult:
    """Rows (method, N, k, mean/var of delta_k and H_k, large-N prediction, n_valid) and per (method, k)
    log-log slopes of Var(delta_k) and Var(H_k) against N"""

    design: Dict[str, object]
    frame: pd.DataFrame
    slopes: pd.DataFrame

    def slope(self, method: str, k: int, column: str = "var_delta_slope") -> float:
        row = self.slopes[(self.slopes["method"] == method) & (self.slopes["k"] == k)]
        return float(row[column].iloc[0])

    def at(self, method: str, n: int) -> pd.DataFrame:
        """Rows for one method and sample size, indexed by k"""
        rows = self.frame[(self.frame["method"] == method) & (self.frame["N"] == n)]
        return rows.set_index("k")

    def to_dict(self) -> dict:
        return {"design": self.design, "scaling": self.frame, "slopes": self.slopes}


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """Per (method, reference, control) tallies over replicates; counts[key][k-1] counts selections of k.

    ElbowSig controls ("per_k", "fdr") may count several k per replicate and count k=1 when
    nothing was significant; every selector counts exactly one k per successful replicate.
    """

    design: Dict[str, object]
    k_max: int
    counts: Dict[Tuple[str, str, str], np.ndarray]
    successful: int
    failures: Dict[int, str] = field(default_factory=dict)
    generated_at: Optional[str] = None

    @property
    def failed_fraction(self) -> float:
        total = self.successful + len(self.failures)
        return len(self.failures) / total if total else 0.0

    @property
    def too_many_failures(self) -> bool:
        return self.failed_fraction > FAILURE_TOLERANCE

    def count(self, method: str, reference: str, control: str, k: int) -> int:
        return int(self.counts[(method, reference, control)][k - 1])

    def counts_frame(self) -> pd.DataFrame:
        rows = [
            {"method": method, "reference": reference, "control": control, "k": k, "count": int(tally[k - 1])}
            for (method, reference, control), tally in self.counts.items()
            for k in range(1, self.k_max + 1)
        ]
        return pd.DataFrame(rows, columns=["method", "reference", "control", "k", "count"])

    def wide_frame(self) -> pd.DataFrame:
        """Table layout: one row per (method, reference, control), one column per k"""
        tidy = self.counts_frame()
        wide = tidy.pivot_table(index=["method", "reference", "control"], columns="k", values="count", sort=False)
        return wide.astype(int).reset_index()

    def to_dict(self, include_timestamp: bool = True) -> dict:
        output = {
            "design": self.design,
            "k_max": self.k_max,
            "successful": self.successful,
            "failures": {str(index): message for index, message in self.failures.items()},
            "failed_fraction": self.failed_fraction,
            "counts": self.counts_frame(),
        }
        if include_timestamp:
            output["generated_at"] = self.generated_at
        return output

    def write(self, out_dir: Union[str, Path]) -> List[Path]:
        """Write <name>.json and <name>_counts.csv (tidy) into out_dir"""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        name = str(self.design.get("name", "experiment"))
        json_path = out_dir / f"{name}.json"
        csv_path = out_dir / f"{name}_counts.csv"
        json_path.write_text(dumps(self.to_dict()))
        self.counts_frame().to_csv(csv_path, index=False)
        log.info(f"Wrote {json_path} and {csv_path}")
        return [json_path, csv_path]


def _replicate_tallies(design: ExperimentDesign, index: int, rng: RngSpec) -> Dict[Tuple[str, str, str], List[int]]:
    """Selected k per (method, reference, control) for one replicate"""
    replicate_rng = rng.derive(index)
    data = design.make_data(replicate_rng.derive(0))
    k_max = design.k_max
    tallies = {}
    for method_index, method in enumerate(design.methods):
        method_rng = replicate_rng.derive(1 + method_index)
        config = design.method_config(method)
        outcomes = fit_sequence(data, config.with_rng(method_rng.derive(0)), range(1, k_max + 2))
        sequence = sequence_from_outcomes(data, outcomes)

        for index_name in ("ch", "db", "silhouette"):
            if index_name in design.selectors:
                curve = index_curve(data, outcomes[1:k_max], ValidityIndex.parse(index_name))
                tallies[(method, "-", index_name)] = [curve.k_hat]

        for reference_index, reference in enumerate(design.reference_types):
            reference_rng = method_rng.derive(1 + reference_index)
            ensemble = build_ensemble(data, config, k_max, design.n_ref, reference, reference_rng.derive(1), threads=1)
            report = assemble_report(
                sequence, ensemble, config, reference_rng, design.q1, design.q2, design.s_sig, design.f_sel, threads=1
            )
            tallies[(method, reference, "per_k")] = sorted(report.per_k_significant) or [1]
            tallies[(method, reference, "fdr")] = sorted(report.fdr_significant) or [1]
            if "gap" in design.selectors:
                gap = gap_from_inertia(sequence.inertia[:k_max], ensemble.inertia[:, :k_max])
                tallies[(method, reference, "gap_I")] = [gap.k_hat_I]
                tallies[(method, reference, "gap_II")] = [gap.k_hat_II]
    return tallies


def run_table_experiment(design: ExperimentDesign, threads: Optional[int] = None) -> ExperimentResult:
    """Replicate the design, tallying the k every method/control selects.

    Replicates run in parallel (each with its own stream, inner work single-threaded); a failed
    replicate is recorded in failures and excluded from the tallies.
    """
    rng = RngSpec(design.seed)
    log.info(f"Experiment {design.name}: {design.replicates} replicates, methods={list(design.methods)}")

    def run_one(index: int):
        try:
            with tagged("replicate", index=index):
                return index, _replicate_tallies(design, index, rng), None
        except (ElbowSigError, ValueError, ArithmeticError) as e:
            log.warning(f"Replicate {index} failed: {e}")
            return index, None, str(e)

    counts: Dict[Tuple[str, str, str], np.ndarray] = {}
    failures = {}
    successful = 0
    for index, tallies, error in parallel_map(run_one, range(design.replicates), threads):
        if error is not None:
            failures[index] = error
            continue
        successful += 1
        for key, chosen in tallies.items():
            tally = counts.setdefault(key, np.zeros(design.k_max, dtype=int))
            for k in chosen:
                tally[k - 1] += 1

    result = ExperimentResult(
        design.to_dict(), design.k_max, counts, successful, failures, generated_at=utc_timestamp()
    )
    if failures:
        log.monitor(f"{len(failures)}/{design.replicates} replicates failed ({result.failed_fraction:.1%})")
    return result


def _moments(column: np.ndarray) -> Tuple[float, float, int]:
    """Mean, sample variance and count of the finite entries"""
    column = column[np.isfinite(column)]
    mean = float(column.mean()) if len(column) else np.nan
    variance = float(column.var(ddof=1)) if len(column) > 1 else np.nan
    return mean, variance, len(column)


def _log_log_slope(x, variances) -> float:
    """Least-squares slope of log variance against log x over the positive finite variances"""
    x, variances = np.asarray(x, dtype=np.float64), np.asarray(variances, dtype=np.float64)
    usable = np.isfinite(variances) & (variances > 0)
    if usable.sum() < 2:
        return np.nan
    return float(stats.linregress(np.log(x[usable]), np.log(variances[usable])).slope)


def run_scaling_experiment(design: ScalingDesign, threads: Optional[int] = None) -> ScalingResult:
    """delta_{k_probe} of N_R uniform [0,1]^D datasets per method and D, with var-vs-D log-log slopes"""
    rng = RngSpec(design.seed)
    configs = [MethodConfig(method=m, fuzzifier=design.fuzzifier) for m in design.methods]
    tasks = [(d_index, r) for d_index in range(len(design.dims)) for r in range(design.n_ref)]
    log.info(f"Scaling run: dims={list(design.dims)}, N={design.n}, k={design.k_probe}, N_R={design.n_ref}")

    def run_one(task):
        d_index, r = task
        unit_rng = rng.derive(d_index).derive(r)
        data = gen_unstructured(design.n, design.dims[d_index], UnstructuredKind.UNIFORM, rng=unit_rng.derive(0))
        deltas = []
        for method_index, config in enumerate(configs):
            try:
                with tagged("scaling", D=design.dims[d_index], reference=r):
                    method_config = config.with_rng(unit_rng.derive(1 + method_index))
                    sequence = heterogeneity_sequence(data, method_config, design.k_probe)
                    deltas.append(elbow_sequence(sequence).at(design.k_probe))
            except ElbowSigError as e:
                log.debug(f"{config.method.value}: {e}")
                deltas.append(np.nan)
        return deltas

    values = np.array(parallel_map(run_one, tasks, threads)).reshape(len(design.dims), design.n_ref, len(configs))
    rows = []
    slopes = {}
    for method_index, method in enumerate(design.methods):
        variances = []
        for d_index, dim in enumerate(design.dims):
            mean, variance, n_valid = _moments(values[d_index, :, method_index])
            variances.append(variance)
            rows.append({"method": method, "D": dim, "mean_delta": mean, "var_delta": variance, "n_valid": n_valid})
        slopes[method] = _log_log_slope(design.dims, variances)
        log.important(f"{method}: slope of log Var(delta_{design.k_probe}) vs log D = {slopes[method]:.3f}")
    frame = pd.DataFrame(rows, columns=["method", "D", "mean_delta", "var_delta", "n_valid"])
    return ScalingResult(design.to_dict(), frame, slopes)


def run_sample_size_experiment(design: SampleSizeDesign, threads: Optional[int] = None) -> SampleSizeResult:
    """delta_k and H_k (k = 2..k_max) of N_R uniform [0,1]^d datasets per method and N,
    with var-vs-N log-log slopes and the large-N prediction of the mean"""
    rng = RngSpec(design.seed)
    configs = [MethodConfig(method=m, fuzzifier=design.fuzzifier, n_init=design.n_init) for m in design.methods]
    k_values = np.arange(2, design.k_max + 1)
    tasks = [(n_index, r) for n_index in range(len(design.ns)) for r in range(design.n_ref)]
    log.info(f"Sample-size run: ns={list(design.ns)}, D={design.d}, k_max={design.k_max}, N_R={design.n_ref}")

    def run_one(task):
        n_index, r = task
        unit_rng = rng.derive(n_index).derive(r)
        data = gen_unstructured(design.ns[n_index], design.d, UnstructuredKind.UNIFORM, rng=unit_rng.derive(0))
        # [method, (delta, H), k]
        values = np.full((len(configs), 2, len(k_values)), np.nan)
        for method_index, config in enumerate(configs):
            try:
                with tagged("sample_size", N=design.ns[n_index], reference=r):
                    method_config = config.with_rng(unit_rng.derive(1 + method_index))
                    sequence = heterogeneity_sequence(data, method_config, design.k_max)
                    values[method_index, 0] = elbow_sequence(sequence).delta
                    values[method_index, 1] = sequence.H[1 : design.k_max]
            except ElbowSigError as e:
                log.debug(f"{config.method.value}: {e}")
        return values

    shape = (len(design.ns), design.n_ref, len(configs), 2, len(k_values))
    values = np.array(parallel_map(run_one, tasks, threads)).reshape(shape)
    rows, slope_rows = [], []
    for method_index, method in enumerate(design.methods):
        var_delta = np.full((len(design.ns), len(k_values)), np.nan)
        var_H = np.full_like(var_delta, np.nan)
        for n_index, n in enumerate(design.ns):
            cell = values[n_index, :, method_index]
            for k_index, k in enumerate(k_values):
                mean_delta, var_delta[n_index, k_index], n_valid = _moments(cell[:, 0, k_index])
                mean_H, var_H[n_index, k_index], _ = _moments(cell[:, 1, k_index])
                rows.append(
                    {
                        "method": method,
                        "N": n,
                        "k": int(k),
                        "mean_delta": mean_delta,
                        "var_delta": var_delta[n_index, k_index],
                        "mean_H": mean_H,
                        "var_H": var_H[n_index, k_index],
                        "predicted_delta": predicted_delta_large_n(design.d, k),
                        "n_valid": n_valid,
                    }
                )
        for k_index, k in enumerate(k_values):
            slope_rows.append(
                {
                    "method": method,
                    "k": int(k),
                    "var_delta_slope": _log_log_slope(design.ns, var_delta[:, k_index]),
                    "var_H_slope": _log_log_slope(design.ns, var_H[:, k_index]),
                }
            )
        first = slope_rows[-len(k_values)]
        log.important(
            f"{method}: at k=2 slope of log Var(delta) vs log N = {first['var_delta_slope']:.3f}, "
            f"of log Var(H) vs log N = {first['var_H_slope']:.3f}"
        )
    columns = ["method", "N", "k", "mean_delta", "var_delta", "mean_H", "var_H", "predicted_delta", "n_valid"]
    frame = pd.DataFrame(rows, columns=columns)
    slopes = pd.DataFrame(slope_rows, columns=["method", "k", "var_delta_slope", "var_H_slope"])
    return SampleSizeResult(design.to_dict(), frame, slopes)


def write_scaling(result: Union[ScalingResult, SampleSizeResult], out_dir: Union[str, Path]) -> List[Path]:
    """Write <name>.json and <name>_scaling.csv into out_dir"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = str(result.design.get("name", "scaling"))
    json_path = out_dir / f"{name}.json"
    csv_path = out_dir / f"{name}_scaling.csv"
    json_path.write_text(dumps(result.to_dict()))
    result.frame.to_csv(csv_path, index=False, float_format=CSV_FLOAT_FORMAT)
    return [json_path, csv_path]


if __name__ == "__main__":
    """Exercise a tiny experiment"""
    tiny = ExperimentDesign(name="tiny", replicates=2, n=60, d=2, k_max=4, n_ref=10, s_sig=5)
    print(run_table_experiment(tiny, threads=2).wide_frame())
