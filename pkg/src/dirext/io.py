"""CSV reading and writing of datasets and composition pairs."""

import logging
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from src.circular.angles import TWO_PI
from src.dataset import Dataset
from src.dirext.directions import DirectionObservation
from src.errors import DatasetFormatError

logger = logging.getLogger(__name__)

DATASET_COLUMNS = ["x1", "x2", "x3", "y"]
WEIGHT_COLUMN = "w"
PAIR_COLUMNS = ["x1a", "x2a", "x3a", "x1b", "x2b", "x3b"]
OBSERVATION_COLUMNS = ["x1", "x2", "x3", "y", "magnitude"]
# Rows whose proportions sum within this of 1 are renormalised.
RENORMALIZE_TOLERANCE = 1e-6

PathLike = Union[str, Path]


def _line_numbers(path: Path, n_rows: int):
    """Physical 1-based lines of the header and of each data row.

    `pd.read_csv` drops blank lines, so row i is not always on line i + 2.
    """
    with open(path, "r", encoding="utf-8") as f:
        filled = [i for i, line in enumerate(f, start=1) if line.strip()]
    header = filled[0] if filled else 1
    rows = np.asarray(filled[1:], dtype=int)
    if rows.size != n_rows:
        rows = header + 1 + np.arange(n_rows)
    return header, rows


def _read_csv(path: PathLike, columns: List[str]):
    """Reads a CSV and checks `columns` are present and numeric.

    Returns:
        The frame and the physical line number of each of its rows.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetFormatError(f"File not found: {path}")
    try:
        frame = pd.read_csv(path, float_precision="round_trip", skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(f"{path} is empty; a header row is required", line=1)
    except pd.errors.ParserError as e:
        raise DatasetFormatError(f"Could not parse {path}: {e}")
    header, lines = _line_numbers(path, len(frame))
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DatasetFormatError(f"{path} is missing columns {missing}", line=header)
    for column in columns:
        values = pd.to_numeric(frame[column], errors="coerce")
        bad = ~np.isfinite(values.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise DatasetFormatError(f"Column '{column}' has a missing or non-numeric value", line=int(lines[row]))
        frame[column] = values.astype(float)
    return frame, lines


def _check_compositions(values: np.ndarray, lines: np.ndarray, path: PathLike) -> np.ndarray:
    """Renormalises rows that nearly sum to 1; raises on anything else."""
    negative = np.any(values < 0.0, axis=1)
    if negative.any():
        row = int(np.argmax(negative))
        raise DatasetFormatError(f"{path}: negative proportion {values[row]}", line=int(lines[row]))
    sums = values.sum(axis=1)
    off = np.abs(sums - 1.0) > RENORMALIZE_TOLERANCE
    if off.any():
        row = int(np.argmax(off))
        raise DatasetFormatError(f"{path}: proportions sum to {sums[row]!r}, not 1", line=int(lines[row]))
    return values / sums[:, None]


def load_dataset(path: PathLike) -> Dataset:
    """Reads a dataset CSV with header `x1,x2,x3,y` and an optional weight column `w`.

    Raises:
        DatasetFormatError: With the offending line number for malformed rows,
            invalid compositions and directions outside [0, 2π).
    """
    columns = DATASET_COLUMNS + ([WEIGHT_COLUMN] if _has_column(path, WEIGHT_COLUMN) else [])
    frame, lines = _read_csv(path, columns)
    if frame.empty:
        logger.info(f"{path} has no rows; returning an empty dataset")
        return Dataset(np.zeros((0, 3)), np.zeros(0))
    locations = _check_compositions(frame[DATASET_COLUMNS[:3]].to_numpy(), lines, path)
    y = frame["y"].to_numpy()
    out_of_range = (y < 0.0) | (y >= TWO_PI)
    if out_of_range.any():
        row = int(np.argmax(out_of_range))
        raise DatasetFormatError(f"{path}: direction {y[row]} outside [0, 2pi)", line=int(lines[row]))
    weights = None
    if WEIGHT_COLUMN in columns:
        weights = frame[WEIGHT_COLUMN].to_numpy()
        if np.any(weights < 0.0):
            row = int(np.argmax(weights < 0.0))
            raise DatasetFormatError(f"{path}: negative weight {weights[row]}", line=int(lines[row]))
    logger.info(f"Loaded {len(frame)} observations from {path}")
    return Dataset(locations, y, weights)


def _has_column(path: PathLike, column: str) -> bool:
    try:
        header = pd.read_csv(path, nrows=0, skipinitialspace=True)
    except (FileNotFoundError, pd.errors.EmptyDataError, pd.errors.ParserError):
        return False
    return column in header.columns


def load_pairs(path: PathLike) -> np.ndarray:
    """Reads composition pairs with header `x1a,x2a,x3a,x1b,x2b,x3b` into an (N, 6) array."""
    frame, lines = _read_csv(path, PAIR_COLUMNS)
    if frame.empty:
        return np.zeros((0, 6))
    first = _check_compositions(frame[PAIR_COLUMNS[:3]].to_numpy(), lines, path)
    second = _check_compositions(frame[PAIR_COLUMNS[3:]].to_numpy(), lines, path)
    logger.info(f"Loaded {len(frame)} composition pairs from {path}")
    return np.hstack([first, second])


def save_dataset(data: Dataset, path: PathLike):
    """Writes `data` in the layout `load_dataset` reads, at full float precision."""
    frame = pd.DataFrame(data.locations, columns=DATASET_COLUMNS[:3])
    frame["y"] = data.directions
    if data.weights is not None:
        frame[WEIGHT_COLUMN] = data.weights
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Wrote {len(data)} observations to {path}")


def save_observations(observations: List[DirectionObservation], path: PathLike):
    """Writes extracted directions with their magnitudes."""
    rows = [(*obs.location, obs.direction.value, obs.magnitude) for obs in observations]
    frame = pd.DataFrame(rows, columns=OBSERVATION_COLUMNS)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Wrote {len(observations)} directions to {path}")
