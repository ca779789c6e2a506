"""Core numeric containers, CSV I/O and deterministic RNG streams"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from elbowsig.utils.error_utils import ConfigError, DataError

log = logging.getLogger("elbowsig")

UINT64_MAX = 2**64 - 1
CSV_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False)
class Dataset:
    """N x D matrix of finite reals (rows = observations) with optional feature names.

    The values array is copied and marked read-only, so a Dataset can be shared across threads.
    """

    values: np.ndarray
    feature_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        try:
            values = np.array(self.values, dtype=np.float64, copy=True)
        except (TypeError, ValueError) as e:
            raise DataError(f"dataset values are not numeric: {e}")
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise DataError(f"dataset must be a 2-D matrix, got {values.ndim} dimensions")
        n, d = values.shape
        if n < 2 or d < 1:
            raise DataError(f"dataset needs N >= 2 rows and D >= 1 columns, got {n} x {d}")
        if not np.all(np.isfinite(values)):
            row, col = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value at row {row + 1}, column {col + 1}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        if self.feature_names is not None:
            names = tuple(str(name) for name in self.feature_names)
            if len(names) != d:
                raise DataError(f"{len(names)} feature names for {d} columns")
            object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> "Dataset":
        return cls(df.to_numpy(dtype=np.float64), feature_names=tuple(str(c) for c in df.columns))

    def to_frame(self) -> pd.DataFrame:
        columns = self.feature_names or [f"x{j}" for j in range(self.d)]
        return pd.DataFrame(self.values, columns=list(columns))

    def __repr__(self):
        names = f", features={list(self.feature_names)}" if self.feature_names else ""
        return f"Dataset(N={self.n}, D={self.d}{names})"


@dataclass(frozen=True)
class RngSpec:
    """A reproducible pseudo-random stream: (master_seed, stream_id) -> PCG64 generator.

    Every Monte-Carlo unit of work gets its own stream through derive(index), so results
    never depend on which thread ran which task.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or not 0 <= value <= UINT64_MAX:
                raise ConfigError(f"RngSpec.{name} must be an unsigned 64-bit integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    def _seed_sequence(self, *extra: int) -> np.random.SeedSequence:
        return np.random.SeedSequence([self.master_seed, self.stream_id, *extra])

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self._seed_sequence()))

    def derive(self, index: int) -> "RngSpec":
        """Child stream for unit `index` (a pure function of master seed, this stream and index)"""
        if index < 0:
            raise ConfigError(f"stream index must be nonnegative, got {index}")
        child_id = int(self._seed_sequence(index).generate_state(1, dtype=np.uint64)[0])
        return RngSpec(self.master_seed, child_id)


def _parse_cell(text: str) -> float:
    """Correctly rounded float parse; unparseable cells become NaN"""
    try:
        return float(text)
    except ValueError:
        return np.nan


def load_csv(path: Union[str, Path], has_header: bool = False) -> Dataset:
    """Read a comma-separated numeric matrix.

    Args:
        path (str | Path): The CSV file
        has_header (bool): First row holds feature names

    Returns:
        Dataset: N = data rows, D = columns
    """
    path = Path(path)
    try:
        raw = pd.read_csv(path, header=0 if has_header else None, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise DataError(f"data file not found: {path}")
    except pd.errors.EmptyDataError:
        raise DataError(f"data file is empty: {path}")
    except pd.errors.ParserError as e:
        raise DataError(f"ragged rows in {path}: {e}")
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}")

    header_lines = 1 if has_header else 0
    missing = raw.isna().to_numpy()
    if missing.any():
        row = int(np.argwhere(missing)[0][0])
        raise DataError(f"ragged rows in {path}: line {row + 1 + header_lines} has fewer than {raw.shape[1]} fields")

    numeric = np.vectorize(_parse_cell, otypes=[np.float64])(raw.to_numpy(dtype=str))
    bad = ~np.isfinite(numeric)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        cell = raw.iat[row, col]
        raise DataError(
            f"{path}: cell at row {row + 1} (line {row + 1 + header_lines}), column {col + 1} "
            f"is not a finite number: {cell!r}"
        )

    names = tuple(str(c).strip() for c in raw.columns) if has_header else None
    dataset = Dataset(numeric, feature_names=names)
    log.info(f"Loaded {path}: N={dataset.n}, D={dataset.d}")
    return dataset


def sniff_header(path: Union[str, Path]) -> bool:
    """True when no cell of the first CSV row parses as a number (the row holds feature names)"""
    path = Path(path)
    try:
        first = pd.read_csv(path, header=None, nrows=1, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise DataError(f"data file not found: {path}")
    except pd.errors.EmptyDataError:
        raise DataError(f"data file is empty: {path}")
    except (pd.errors.ParserError, OSError) as e:
        raise DataError(f"cannot read {path}: {e}")
    parsed = pd.to_numeric(first.iloc[0].str.strip(), errors="coerce")
    return bool(parsed.isna().all())


def write_csv(data: Dataset, path: Union[str, Path], header: bool = True):
    """Write a Dataset with 17 significant digits (round-trips float64 exactly)"""
    data.to_frame().to_csv(path, index=False, header=header, float_format=CSV_FLOAT_FORMAT)


def column_ranges(data: Dataset) -> List[Tuple[float, float]]:
    """Observed (min, max) of every feature"""
    lows = data.values.min(axis=0)
    highs = data.values.max(axis=0)
    return [(float(lo), float(hi)) for lo, hi in zip(lows, highs)]


def standardize(data: Dataset) -> Dataset:
    """z-score every column; constant columns are only centred"""
    mean = data.values.mean(axis=0)
    std = data.values.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return Dataset((data.values - mean) / std, feature_names=data.feature_names)


if __name__ == "__main__":
    """Exercise the data model"""
    import tempfile

    ds = Dataset(np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]))
    print(ds, column_ranges(ds))
    with tempfile.TemporaryDirectory() as tmp:
        csv_path = Path(tmp) / "data.csv"
        write_csv(ds, csv_path, header=True)
        print(load_csv(csv_path, has_header=True))

    spec = RngSpec(7)
    print(spec.derive(3), spec.derive(3).generator().random(3))
