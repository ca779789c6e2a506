"""Welcome to the ElbowSig API Classes

- ElbowSig: End-to-end significance analysis of the number of clusters
- SampleData: Bundled sample datasets (Iris)
"""

from .elbow_sig import ElbowSig
from .sample_data import SampleData

__all__ = [
    "ElbowSig",
    "SampleData",
]
