# Copyright (c) 2021-2026 SuperCowPowers LLC

"""
ElbowSig
- Heterogeneity sequences for agglomerative, k-means, fuzzy c-means and Gaussian mixture clustering
- The elbow statistic and its Monte-Carlo significance against null references
  - Per-scale (calibrated threshold) and FDR (Benjamini-Hochberg) significance
- Gap statistic, Calinski-Harabasz, Davies-Bouldin and silhouette baselines
"""

from importlib.metadata import version

try:
    __version__ = version("elbowsig")
except Exception:
    __version__ = "unknown"

# ElbowSig Logging
from elbowsig.utils.logger import logging_setup

logging_setup()
