"""ElbowSig: Significance of the elbow statistic at every candidate number of clusters"""

import logging
from typing import Optional, Union

import pandas as pd

from elbowsig.core.baselines import gap_statistic, select_indices
from elbowsig.core.clustering import MethodConfig
from elbowsig.core.data_model import Dataset, RngSpec, standardize
from elbowsig.core.inference import (
    DEFAULT_F_SEL,
    DEFAULT_K_MAX,
    DEFAULT_N_REF,
    DEFAULT_Q1,
    DEFAULT_Q2,
    DEFAULT_S_SIG,
    SignificanceReport,
    analyze,
    validate_levels,
)
from elbowsig.core.reference_gen import ReferenceType


class ElbowSig:
    """ElbowSig: Multiscale significance testing of the number of clusters

    Common Usage:
        ```python
        from elbowsig.api import ElbowSig, SampleData

        iris = SampleData().get("iris")
        elbow_sig = ElbowSig(method="kmeans", reference="pca", k_max=10, seed=7)

        # Per-k and FDR significant numbers of clusters
        report = elbow_sig.analyze(iris)
        print(report.summary_text())

        # Gap statistic and validity indices on the same backend
        elbow_sig.baselines(iris)
        ```
    """

    def __init__(
        self,
        method: str = "kmeans",
        reference: str = "pca",
        k_max: int = DEFAULT_K_MAX,
        n_ref: int = DEFAULT_N_REF,
        q1: float = DEFAULT_Q1,
        q2: float = DEFAULT_Q2,
        s_sig: int = DEFAULT_S_SIG,
        f_sel: float = DEFAULT_F_SEL,
        fuzzifier: float = 2.0,
        n_init: int = 1,
        seed: int = 0,
        standardize_features: bool = False,
        threads: Optional[int] = None,
    ):
        """ElbowSig Init Method (every parameter is validated here, before any fitting)"""
        self.log = logging.getLogger("elbowsig")
        validate_levels(k_max, n_ref, q1, q2, s_sig, f_sel)
        self.rng = RngSpec(seed)
        self.config = MethodConfig(method=method, fuzzifier=fuzzifier, n_init=n_init, rng=self.rng)
        self.reference = ReferenceType.parse(reference)
        self.k_max = k_max
        self.n_ref = n_ref
        self.q1 = q1
        self.q2 = q2
        self.s_sig = s_sig
        self.f_sel = f_sel
        self.standardize_features = standardize_features
        self.threads = threads

    def _prepare(self, data: Union[Dataset, pd.DataFrame]) -> Dataset:
        if isinstance(data, pd.DataFrame):
            data = Dataset.from_frame(data)
        return standardize(data) if self.standardize_features else data

    def analyze(self, data: Union[Dataset, pd.DataFrame]) -> SignificanceReport:
        """Run the full analysis

        Args:
            data (Dataset | pd.DataFrame): The observations (numeric columns only)

        Returns:
            SignificanceReport: p-values, calibrated threshold and significant sets
        """
        return analyze(
            self._prepare(data),
            self.config,
            k_max=self.k_max,
            n_ref=self.n_ref,
            reference_type=self.reference,
            q1=self.q1,
            q2=self.q2,
            rng=self.rng,
            s_sig=self.s_sig,
            f_sel=self.f_sel,
            threads=self.threads,
        )

    def baselines(self, data: Union[Dataset, pd.DataFrame]) -> dict:
        """Gap statistic (rules I and II) and the CH / DB / silhouette selections

        Returns:
            dict: {"gap": GapResult.to_dict(), "ch"|"db"|"silhouette": IndexCurve.to_dict()}
        """
        data = self._prepare(data)
        gap = gap_statistic(data, self.config, self.k_max, self.n_ref, self.reference, self.rng, self.threads)
        curves = select_indices(data, self.config.with_rng(self.rng.derive(0)), self.k_max)
        output = {"gap": gap.to_dict()}
        output.update({index.value: curve.to_dict() for index, curve in curves.items()})
        self.log.important(
            f"Gap(I)={gap.k_hat_I}, Gap(II)={gap.k_hat_II}, "
            + ", ".join(f"{index.value.upper()}={curve.k_hat}" for index, curve in curves.items())
        )
        return output

    def __repr__(self):
        return (
            f"ElbowSig(method={self.config.method.value}, reference={self.reference.value}, k_max={self.k_max}, "
            f"n_ref={self.n_ref}, q1={self.q1}, q2={self.q2}, seed={self.rng.master_seed})"
        )


if __name__ == "__main__":
    """Exercise the ElbowSig Class"""
    from elbowsig.api.sample_data import SampleData

    iris = SampleData().get("iris")
    elbow_sig = ElbowSig(method="kmeans", reference="pca", k_max=6, n_ref=50, s_sig=10, seed=7)
    print(elbow_sig)
    print(elbow_sig.analyze(iris).summary_text())
    print(elbow_sig.baselines(iris))
