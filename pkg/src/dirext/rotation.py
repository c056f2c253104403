"""Spherical coordinates of square-rooted compositions and the frame rotation O_p."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.circular.angles import arctan_star
from src.dataset import validate_simplex_points
from src.errors import DomainError

logger = logging.getLogger(__name__)

# Points closer than this to the z-axis are on the pole, where φ is set to 0.
POLE_TOLERANCE = 1e-15
ORTHOGONALITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class RotationMatrix:
    """Orthogonal 3×3 matrix whose last column is √x for the composition x it was built from.

    `on_pole` records that x = (0, 0, 1) and φ₁ was set to 0.
    """

    matrix: np.ndarray
    theta: float
    phi: float
    on_pole: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise DomainError(f"Rotation matrix must be 3x3, got {m.shape}")
        if np.max(np.abs(m.T @ m - np.eye(3))) > ORTHOGONALITY_TOLERANCE:
            raise DomainError("Rotation matrix is not orthogonal")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def to_frame(self, v: np.ndarray) -> np.ndarray:
        """Coordinates of v in the frame, Oᵀv."""
        return self.matrix.T @ np.asarray(v, dtype=float)

    def from_frame(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)


def spherical_coordinates(v: np.ndarray) -> Tuple[float, float, bool]:
    """Polar angle θ ∈ [0, π] and azimuth φ ∈ [0, 2π) of a unit 3-vector.

    Returns:
        (θ, φ, on_pole); φ is 0 when the vector lies on the z-axis.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise DomainError(f"Expected a 3-vector, got shape {v.shape}")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DomainError("Spherical coordinates are undefined for the zero vector")
    v = v / norm
    theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
    if np.hypot(v[0], v[1]) < POLE_TOLERANCE:
        return theta, 0.0, True
    return theta, float(arctan_star(v[0], v[1])), False


def unit_vector(theta: float, phi: float) -> np.ndarray:
    """(sin θ cos φ, sin θ sin φ, cos θ)."""
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def rotation_matrix(x: np.ndarray) -> RotationMatrix:
    """Builds O_p for the composition x from the spherical coordinates (θ₁, φ₁) of √x.

    Columns are the unit vectors at (θ₁ + π/2, φ₁), at (π/2, φ₁ + π/2) and at
    (θ₁, φ₁), so O_p maps (0, 0, 1) to √x.

    Raises:
        DomainError: If x is not a composition.
    """
    point = validate_simplex_points(x)
    if point.shape[0] != 1:
        raise DomainError(f"rotation_matrix takes one composition, got {point.shape[0]}")
    theta, phi, on_pole = spherical_coordinates(np.sqrt(point[0]))
    if on_pole:
        logger.debug("Composition sits on the third vertex; using phi = 0")
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    matrix = np.array(
        [
            [ct * cp, -sp, st * cp],
            [ct * sp, cp, st * sp],
            [-st, 0.0, ct],
        ]
    )
    return RotationMatrix(matrix, theta, phi, on_pole)
