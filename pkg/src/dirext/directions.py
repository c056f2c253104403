"""Random directions between consecutive compositions, and their inverse."""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from src.circular.angles import Angle, arctan_star
from src.dataset import Dataset, validate_simplex_points
from src.dirext.rotation import POLE_TOLERANCE, rotation_matrix, unit_vector
from src.errors import AntipodalMovementError, DegenerateMovementError, DomainError

logger = logging.getLogger(__name__)

# Magnitudes within this of 0 mean the compositions coincide.
ZERO_MAGNITUDE = 1e-12
# Negative coordinates of √x₂ above this are rounding noise.
ORTHANT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DirectionObservation:
    """A direction φ′₂ observed at x₁, and its magnitude θ′₂ on the sphere.

    A direction of 0 pushes away from the third category and π pulls toward it;
    π/2 pulls toward the second category and 3π/2 pushes away from it.
    """

    location: Tuple[float, float, float]
    direction: Angle
    magnitude: float

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(v) for v in self.location))
        if not isinstance(self.direction, Angle):
            object.__setattr__(self, "direction", Angle(float(self.direction)))
        if not self.magnitude >= 0.0:
            raise DomainError(f"Direction magnitude must be >= 0, got {self.magnitude}")


def extract_direction(x1: Sequence[float], x2: Sequence[float]) -> DirectionObservation:
    """Direction and magnitude of the move from x1 to x2.

    √x₂ is expressed in the frame of x1, x′₂ = O_pᵀ√x₂, and (θ′₂, φ′₂) are the
    spherical coordinates of x′₂.

    Raises:
        DegenerateMovementError: If x1 and x2 coincide.
        AntipodalMovementError: If √x₂ is the antipode of √x₁.
        DomainError: If either input is not a composition.
    """
    start = validate_simplex_points(x1)[0]
    end = validate_simplex_points(x2)[0]
    frame = rotation_matrix(start)
    moved = frame.to_frame(np.sqrt(end))
    moved = moved / np.linalg.norm(moved)
    if np.hypot(moved[0], moved[1]) < POLE_TOLERANCE:
        if moved[2] > 0.0:
            raise DegenerateMovementError(f"Compositions {start} and {end} coincide; no direction")
        raise AntipodalMovementError(f"Composition {end} is antipodal to {start}; direction undefined")
    magnitude = float(np.arccos(np.clip(moved[2], -1.0, 1.0)))
    if magnitude < ZERO_MAGNITUDE:
        raise DegenerateMovementError(f"Compositions {start} and {end} coincide; no direction")
    return DirectionObservation(tuple(start), Angle(arctan_star(moved[0], moved[1])), magnitude)


def compose_from_direction(x1: Sequence[float], direction: float, magnitude: float) -> np.ndarray:
    """Inverse of extract_direction: x₂ = (O_p·u(θ′, φ′))², u the unit vector.

    Raises:
        DomainError: If the move leaves the positive orthant of the sphere, so no
            composition has that direction.
    """
    if magnitude < 0.0:
        raise DomainError(f"Direction magnitude must be >= 0, got {magnitude}")
    frame = rotation_matrix(x1)
    root = frame.from_frame(unit_vector(magnitude, direction))
    if np.any(root < -ORTHANT_TOLERANCE):
        raise DomainError(f"Moving {magnitude} along {direction} from {x1} leaves the simplex")
    x2 = np.clip(root, 0.0, None) ** 2
    return x2 / x2.sum()


def extract_directions(pairs: np.ndarray, show_progress: bool = False) -> Tuple[List[DirectionObservation], int]:
    """Extracts a direction from each (x₁, x₂) row of an (N, 6) array.

    Pairs with no movement or an antipodal move are skipped and counted.

    Returns:
        (observations, skipped)
    """
    pairs = np.atleast_2d(np.asarray(pairs, dtype=float))
    if pairs.shape[1] != 6:
        raise DomainError(f"Composition pairs must have 6 columns, got {pairs.shape[1]}")
    observations, skipped = [], 0
    for row in tqdm(pairs, desc="Extracting directions", unit="pair", leave=False, disable=not show_progress):
        try:
            observations.append(extract_direction(row[:3], row[3:]))
        except (DegenerateMovementError, AntipodalMovementError) as e:
            logger.debug(f"Skipping pair: {e}")
            skipped += 1
    if skipped:
        logger.warning(f"Skipped {skipped} of {len(pairs)} pairs with no usable direction")
    return observations, skipped


def dedup(observations: List[DirectionObservation], tol: float = 0.0) -> Tuple[List[DirectionObservation], int]:
    """Keeps the first observation at each location.

    Locations within `tol` of a kept location in max-norm count as the same location.

    Returns:
        (kept, removed)
    """
    if tol < 0.0:
        raise DomainError(f"Duplicate tolerance must be >= 0, got {tol}")
    kept: List[DirectionObservation] = []
    seen = np.zeros((0, 3))
    for obs in observations:
        loc = np.asarray(obs.location)
        if seen.shape[0] and np.any(np.max(np.abs(seen - loc), axis=1) <= tol):
            continue
        kept.append(obs)
        seen = np.vstack([seen, loc])
    removed = len(observations) - len(kept)
    if removed:
        logger.info(f"Removed {removed} duplicated directions")
    return kept, removed


def observations_to_dataset(observations: List[DirectionObservation]) -> Dataset:
    if not observations:
        return Dataset(np.zeros((0, 3)), np.zeros(0))
    locations = np.array([obs.location for obs in observations])
    directions = np.array([obs.direction.value for obs in observations])
    return Dataset(locations, directions)
