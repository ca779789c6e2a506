"""SampleData: Read-only access to the sample datasets bundled with ElbowSig"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from sklearn.datasets import load_iris

from elbowsig.core.data_model import Dataset, write_csv


def _iris_frame() -> pd.DataFrame:
    bunch = load_iris(as_frame=True)
    return bunch.frame.rename(columns={"target": "label"})


class SampleData:
    """SampleData: list/get interface for the bundled sample datasets

    Common Usage:
        ```python
        sample_data = SampleData()

        # List available datasets
        sample_data.list()

        # Get a dataset (features only, labels are kept apart)
        iris = sample_data.get("iris")
        print(iris)

        # Write it as CSV for the command line
        sample_data.export("iris", "iris.csv")
        ```
    """

    DATASETS = {
        "iris": ("Fisher's Iris: 4 measurements of 150 flowers from 3 species", _iris_frame),
    }

    def __init__(self):
        """SampleData Init Method"""
        self.log = logging.getLogger("elbowsig")
        self._frames = {}

    def list(self) -> list:
        """List all available datasets

        Returns:
            list: Dataset names
        """
        return sorted(self.DATASETS)

    def _frame(self, name: str) -> Optional[pd.DataFrame]:
        if name not in self.DATASETS:
            self.log.warning(f"Dataset '{name}' not found in sample data (available: {self.list()})")
            return None
        if name not in self._frames:
            self.log.info(f"Loading sample dataset '{name}'...")
            self._frames[name] = self.DATASETS[name][1]()
        return self._frames[name]

    def get(self, name: str) -> Optional[Dataset]:
        """Retrieve a dataset by name

        Args:
            name (str): The dataset name (as returned by list()).

        Returns:
            Dataset: The feature matrix, or None if not found.
        """
        frame = self._frame(name)
        if frame is None:
            return None
        return Dataset.from_frame(frame.drop(columns=["label"]))

    def labels(self, name: str) -> Optional[np.ndarray]:
        """True class labels of a dataset (for diagnostics, never part of the Dataset)"""
        frame = self._frame(name)
        return None if frame is None else frame["label"].to_numpy()

    def export(self, name: str, path: Union[str, Path]) -> Optional[Path]:
        """Write a dataset as CSV with a header row"""
        data = self.get(name)
        if data is None:
            return None
        write_csv(data, path, header=True)
        self.log.info(f"Wrote {name} to {path}")
        return Path(path)

    def details(self) -> pd.DataFrame:
        """Return name, N, D and a description for every dataset"""
        rows = []
        for name, (description, _) in sorted(self.DATASETS.items()):
            data = self.get(name)
            rows.append({"name": name, "N": data.n, "D": data.d, "description": description})
        return pd.DataFrame(rows, columns=["name", "N", "D", "description"])

    def __repr__(self):
        """Return a string representation of the SampleData object."""
        return self.details().to_string(index=False, header=False)


if __name__ == "__main__":
    """Exercise the SampleData Class"""

    sample_data = SampleData()
    print("Available Datasets:")
    print(sample_data.list())
    print(sample_data)
    print(sample_data.get("iris"))
