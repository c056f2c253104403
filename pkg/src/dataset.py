"""Observed directions at points of the 2-simplex, with optional weights."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.circular.angles import wrap_angle
from src.errors import DomainError

SIMPLEX_TOLERANCE = 1e-9


def validate_simplex_points(points: np.ndarray, tol: float = SIMPLEX_TOLERANCE) -> np.ndarray:
    """Checks that every row is a 3-part composition and returns a float copy.

    Args:
        points: Array of shape (N, 3) or (3,).
        tol: Allowed deviation of each row sum from 1.

    Returns:
        A 2-D float array of shape (N, 3).

    Raises:
        DomainError: If a row has negative entries or does not sum to 1 within `tol`.
    """
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.shape[-1] != 3:
        raise DomainError(f"Simplex points must have 3 coordinates, got shape {arr.shape}")
    if np.any(arr < -tol):
        bad = int(np.argmax(np.any(arr < -tol, axis=1)))
        raise DomainError(f"Simplex point {bad} has a negative coordinate: {arr[bad]}")
    sums = arr.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > tol):
        bad = int(np.argmax(np.abs(sums - 1.0) > tol))
        raise DomainError(f"Simplex point {bad} sums to {sums[bad]!r}, not 1")
    return np.clip(arr, 0.0, None)


@dataclass
class Dataset:
    """Directions observed at locations on the 2-simplex.

    `locations` has shape (N, 3) and `directions` shape (N,), radians in [0, 2π).
    """

    locations: np.ndarray
    directions: np.ndarray
    weights: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        self.locations = validate_simplex_points(self.locations) if len(self.locations) else np.zeros((0, 3))
        self.directions = wrap_angle(np.asarray(self.directions, dtype=float).reshape(-1))
        if self.locations.shape[0] != self.directions.shape[0]:
            raise DomainError(
                f"Dataset has {self.locations.shape[0]} locations but {self.directions.shape[0]} directions"
            )
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
            if self.weights.shape[0] != self.directions.shape[0]:
                raise DomainError("Dataset weights must match the number of observations")

    def __len__(self) -> int:
        return int(self.directions.shape[0])

    def subset(self, index: np.ndarray) -> "Dataset":
        """Returns the observations selected by an index array or boolean mask."""
        weights = None if self.weights is None else self.weights[index]
        return Dataset(self.locations[index], self.directions[index], weights)

    def __str__(self) -> str:
        return f"Dataset(N={len(self)})"
