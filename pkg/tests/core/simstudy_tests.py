"""Tests for the synthetic data generators and the experiment harnesses"""

from pathlib import Path

import numpy as np
import pytest

from elbowsig.core.data_model import RngSpec
from elbowsig.core.simstudy import (
    BlobSpec,
    ExperimentDesign,
    SampleSizeDesign,
    ScalingDesign,
    UnstructuredKind,
    gen_blobs,
    gen_unstructured,
    run_sample_size_experiment,
    run_scaling_experiment,
    run_table_experiment,
    write_scaling,
)
from elbowsig.utils.design_utils import load_design
from elbowsig.utils.error_utils import ConfigError
from elbowsig.utils.json_utils import dumps, loads

DESIGNS = Path(__file__).resolve().parents[2] / "applications" / "designs"

TINY = dict(
    name="tiny",
    replicates=3,
    n=40,
    d=2,
    m=2,
    methods=("kmeans", "agglomerative"),
    reference_types=("bbox", "pca"),
    k_max=4,
    n_ref=10,
    s_sig=3,
    seed=11,
)


def test_blob_spec_validation():
    with pytest.raises(ConfigError):
        BlobSpec(n=10, d=2, m=0, sigma_c=1.0)
    with pytest.raises(ConfigError):
        BlobSpec(n=10, d=2, m=3, sigma_c=0.0)
    with pytest.raises(ConfigError):
        BlobSpec(n=2, d=2, m=3, sigma_c=1.0)


def test_gen_blobs_single_component():
    spec = BlobSpec(n=400, d=3, m=1, sigma_c=2.0, rng=RngSpec(1))
    blobs = gen_blobs(spec)
    assert (blobs.data.n, blobs.data.d) == (400, 3)
    assert np.all(blobs.labels == 0)
    deviation = np.abs(blobs.data.values.mean(axis=0) - blobs.centers[0])
    assert np.all(deviation < 4 * spec.sigma_c / np.sqrt(spec.n))


def test_gen_blobs_centers_and_spread():
    spec = BlobSpec(n=600, d=4, m=3, sigma_c=1.5, rng=RngSpec(2))
    blobs = gen_blobs(spec)
    assert np.all(np.abs(blobs.centers) <= spec.box_halfwidth)
    assert set(np.unique(blobs.labels)) <= {0, 1, 2}
    for j in range(spec.m):
        members = blobs.data.values[blobs.labels == j]
        if len(members) >= 50:
            trace = np.trace(np.cov(members.T))
            assert abs(trace - spec.d * spec.sigma_c**2) < 0.2 * spec.d * spec.sigma_c**2


def test_gen_blobs_deterministic():
    spec = BlobSpec(n=50, d=2, m=2, sigma_c=1.0, rng=RngSpec(3))
    assert np.array_equal(gen_blobs(spec).data.values, gen_blobs(spec).data.values)


def test_gen_unstructured():
    uniform = gen_unstructured(500, 3, "UniformBox01", rng=RngSpec(4))
    assert np.all((uniform.values >= 0) & (uniform.values <= 1))
    gaussian = gen_unstructured(10_000, 1, UnstructuredKind.GAUSSIAN, sigma=1.0, rng=RngSpec(5))
    assert abs(gaussian.values.var() - 1.0) < 0.06
    again = gen_unstructured(10_000, 1, "gaussian", rng=RngSpec(5))
    assert np.array_equal(gaussian.values, again.values)
    with pytest.raises(ConfigError):
        gen_unstructured(1, 3, "uniform")
    with pytest.raises(ConfigError):
        gen_unstructured(10, 3, "poisson")


def test_experiment_design_validation():
    design = ExperimentDesign(**TINY)
    assert design.methods == ("kmeans", "agglomerative")
    with pytest.raises(ConfigError):
        ExperimentDesign(**{**TINY, "replicates": 0})
    with pytest.raises(ConfigError):
        ExperimentDesign(**{**TINY, "generator": "mixture"})
    with pytest.raises(ConfigError):
        ExperimentDesign(**{**TINY, "selectors": ("gap", "dunn")})
    with pytest.raises(ConfigError):
        ExperimentDesign(**{**TINY, "k_max": 40})
    with pytest.raises(ConfigError):
        ExperimentDesign(**{**TINY, "methods": ("dbscan",)})


def test_experiment_plan():
    plan = ExperimentDesign(**TINY).plan()
    assert plan["replicates"] == 3
    assert plan["analyses_per_replicate"] == 4
    assert plan["sequence_fits"] == 3 * (2 + 4 * 10)


def test_shipped_designs_load():
    tables = [path for path in sorted(DESIGNS.glob("*.toml")) if not path.stem.endswith("scaling")]
    assert len(tables) == 9
    for path in tables:
        design = load_design(ExperimentDesign, path)
        assert design.name == path.stem
        assert design.plan()["replicates"] == 100
    scaling = load_design(ScalingDesign, DESIGNS / "null_scaling.toml")
    assert scaling.dims == (8, 16, 32, 64, 128)
    sample_size = load_design(SampleSizeDesign, DESIGNS / "null_n_scaling.toml")
    assert sample_size.ns == (100, 300, 1000, 3000) and sample_size.k_max == 20


def test_table_experiment_tallies():
    result = run_table_experiment(ExperimentDesign(**TINY), threads=2)
    assert result.successful + len(result.failures) == 3
    for (method, reference, control), tally in result.counts.items():
        assert len(tally) == 4
        if control in ("per_k", "fdr"):
            assert tally.sum() >= result.successful
        else:
            assert tally.sum() == result.successful
        if reference == "-":
            assert tally[0] == 0
    assert ("kmeans", "pca", "gap_I") in result.counts
    assert ("agglomerative", "-", "silhouette") in result.counts
    assert result.count("kmeans", "bbox", "per_k", 1) == result.counts[("kmeans", "bbox", "per_k")][0]


def test_table_experiment_reproducible():
    design = ExperimentDesign(**{**TINY, "replicates": 2, "methods": ("fcm",), "reference_types": ("pca",)})
    first = run_table_experiment(design, threads=1)
    second = run_table_experiment(design, threads=3)
    assert first.counts.keys() == second.counts.keys()
    for key in first.counts:
        assert np.array_equal(first.counts[key], second.counts[key])
    assert dumps(first.to_dict(include_timestamp=False)) == dumps(second.to_dict(include_timestamp=False))
    assert first.counts_frame().equals(second.counts_frame())


def test_experiment_result_outputs(tmp_path):
    result = run_table_experiment(ExperimentDesign(**{**TINY, "replicates": 1, "methods": ("agglomerative",)}))
    wide = result.wide_frame()
    assert wide.columns.tolist()[:3] == ["method", "reference", "control"]
    assert [c for c in wide.columns[3:]] == [1, 2, 3, 4]
    json_path, csv_path = result.write(tmp_path)
    assert json_path.name == "tiny.json" and csv_path.name == "tiny_counts.csv"
    payload = loads(json_path.read_text())
    assert payload["successful"] == 1
    assert payload["design"]["name"] == "tiny"
    assert not result.too_many_failures


def test_scaling_design_validation():
    with pytest.raises(ConfigError, match="decade"):
        ScalingDesign(dims=(8, 16, 32))
    with pytest.raises(ConfigError):
        ScalingDesign(k_probe=30, n=30)
    design = ScalingDesign(methods=["kmeans"], dims=[2, 5, 20])
    assert design.methods == ("kmeans",) and design.dims == (2, 5, 20)


def test_scaling_experiment_small(tmp_path):
    design = ScalingDesign(name="small", n=12, k_probe=3, methods=("kmeans", "fcm"), dims=(2, 5, 20), n_ref=6, seed=3)
    result = run_scaling_experiment(design, threads=2)
    assert result.frame.columns.tolist() == ["method", "D", "mean_delta", "var_delta", "n_valid"]
    assert len(result.frame) == 6
    assert set(result.slopes) == {"kmeans", "fcm"}
    again = run_scaling_experiment(design, threads=1)
    assert result.frame.equals(again.frame)
    paths = write_scaling(result, tmp_path)
    assert [p.name for p in paths] == ["small.json", "small_scaling.csv"]


def test_sample_size_design_validation():
    with pytest.raises(ConfigError, match="decade"):
        SampleSizeDesign(ns=(100, 200, 400))
    with pytest.raises(ConfigError):
        SampleSizeDesign(ns=(10, 30, 100), k_max=10)
    with pytest.raises(ConfigError):
        SampleSizeDesign(n_init=0)
    design = SampleSizeDesign(methods="agglomerative", ns=[20, 60, 200], k_max=5)
    assert design.methods == ("agglomerative",) and design.ns == (20, 60, 200)


def test_sample_size_experiment_small(tmp_path):
    design = SampleSizeDesign(
        name="n_small", d=2, ns=(8, 20, 80), k_max=4, methods=("kmeans", "agglomerative"), n_ref=5, seed=4
    )
    result = run_sample_size_experiment(design, threads=2)
    assert len(result.frame) == 2 * 3 * 3
    assert result.slopes.columns.tolist() == ["method", "k", "var_delta_slope", "var_H_slope"]
    assert len(result.slopes) == 2 * 3
    assert np.allclose(result.frame["predicted_delta"], 2.0 / result.frame["k"])
    assert result.frame["n_valid"].max() <= 5

    # Ward merges only ever add heterogeneity
    ward = result.at("agglomerative", 80)
    assert ward.loc[2, "mean_H"] >= ward.loc[3, "mean_H"] >= ward.loc[4, "mean_H"]
    assert np.isfinite(result.slope("agglomerative", 2, "var_H_slope"))

    again = run_sample_size_experiment(design, threads=1)
    assert result.frame.equals(again.frame)
    paths = write_scaling(result, tmp_path)
    assert [p.name for p in paths] == ["n_small.json", "n_small_scaling.csv"]
    payload = loads(paths[0].read_text())
    assert payload["design"]["ns"] == [8, 20, 80]


def _replicates_detecting(result, method, reference, control) -> int:
    """Replicates where the control found structure (k = 1 is tallied when nothing was significant)"""
    return result.successful - result.count(method, reference, control, 1)


@pytest.mark.long
def test_blobs_d5_reproduction():
    """Three blobs in D=5: per-k, FDR and Gap(I) all find k = 3 almost always"""
    result = run_table_experiment(load_design(ExperimentDesign, DESIGNS / "blobs_d5.toml"))
    assert not result.too_many_failures
    assert result.count("agglomerative", "pca", "per_k", 3) >= 90
    assert result.count("agglomerative", "pca", "fdr", 3) >= 90
    assert result.count("agglomerative", "pca", "gap_I", 3) >= 90


@pytest.mark.long
def test_blobs_d20_reproduction():
    result = run_table_experiment(load_design(ExperimentDesign, DESIGNS / "blobs_d20.toml"))
    assert result.count("agglomerative", "pca", "per_k", 5) >= 97


@pytest.mark.long
def test_uniform_2d_false_positives():
    """Per-k and FDR detections stay within three binomial SDs of the nominal rates; Gap(I) mostly picks k = 1"""
    result = run_table_experiment(load_design(ExperimentDesign, DESIGNS / "uniform_2d.toml"))
    assert _replicates_detecting(result, "agglomerative", "bbox", "per_k") <= 35
    assert _replicates_detecting(result, "agglomerative", "bbox", "fdr") <= 10
    assert result.count("agglomerative", "bbox", "gap_I", 1) >= 85


@pytest.mark.long
def test_null_scaling_slopes():
    design = load_design(ScalingDesign, DESIGNS / "null_scaling.toml", methods=["kmeans", "agglomerative"])
    result = run_scaling_experiment(design)
    for method in ("kmeans", "agglomerative"):
        assert -1.4 <= result.slopes[method] <= -0.6


@pytest.mark.long
def test_null_fcm_matches_prediction():
    design = ScalingDesign(name="fcm", methods=("fcm",), dims=(5, 50, 128), n_ref=200, fuzzifier=2.0, seed=4)
    result = run_scaling_experiment(design)
    mean_at_50 = result.frame.set_index("D").loc[50, "mean_delta"]
    assert abs(mean_at_50 - 1.0) <= 0.15


@pytest.mark.long
def test_null_sample_size_slopes():
    """Var(H_k) grows like N and Var(delta_k) shrinks like 1/N"""
    result = run_sample_size_experiment(load_design(SampleSizeDesign, DESIGNS / "null_n_scaling.toml"))
    assert -1.4 <= result.slope("kmeans", 3, "var_delta_slope") <= -0.6
    assert 0.6 <= result.slope("kmeans", 3, "var_H_slope") <= 1.4


@pytest.mark.long
def test_large_n_mean_matches_prediction():
    """For 10 <= k <= 20 the null mean of delta_k follows (1 + 2/D) / k"""
    design = SampleSizeDesign(name="large_n", d=1, ns=(500, 1500, 5000), k_max=20, n_ref=50, seed=9)
    rows = run_sample_size_experiment(design).at("kmeans", 5000).loc[10:20]
    ratio = rows["mean_delta"].mean() / rows["predicted_delta"].mean()
    assert 0.85 <= ratio <= 1.4
    assert rows.loc[10:12, "mean_delta"].mean() > rows.loc[18:20, "mean_delta"].mean()


if __name__ == "__main__":
    test_gen_blobs_single_component()
    test_experiment_plan()
    test_table_experiment_tallies()
    print("All simstudy tests passed!")
