"""Direction extraction from consecutive compositions and dataset files."""

from src.dirext.directions import (
    DirectionObservation,
    compose_from_direction,
    dedup,
    extract_direction,
    extract_directions,
    observations_to_dataset,
)
from src.dirext.io import load_dataset, load_pairs, save_dataset, save_observations
from src.dirext.rotation import RotationMatrix, rotation_matrix, spherical_coordinates, unit_vector

__all__ = [
    "DirectionObservation",
    "RotationMatrix",
    "compose_from_direction",
    "dedup",
    "extract_direction",
    "extract_directions",
    "load_dataset",
    "load_pairs",
    "observations_to_dataset",
    "rotation_matrix",
    "save_dataset",
    "save_observations",
    "spherical_coordinates",
    "unit_vector",
]
