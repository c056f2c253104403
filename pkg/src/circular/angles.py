"""Angle type and the branch-corrected inverse tangent."""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.errors import DomainError

TWO_PI = 2.0 * np.pi
# Points whose Euclidean norm is at most this count as the origin.
ORIGIN_TOLERANCE = 0.0

ArrayLike = Union[float, np.ndarray]


def wrap_angle(x: ArrayLike) -> ArrayLike:
    """Wraps radians into [0, 2π).

    `np.mod` can return exactly 2π for tiny negative inputs; those are folded to 0.
    """
    wrapped = np.mod(x, TWO_PI)
    wrapped = np.where(wrapped >= TWO_PI, 0.0, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class Angle:
    """A direction in [0, 2π). Any real passed to the constructor is wrapped."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", wrap_angle(float(self.value)))

    def __float__(self) -> float:
        return self.value

    def unit_vector(self) -> Tuple[float, float]:
        return float(np.cos(self.value)), float(np.sin(self.value))


def at_origin(z1: ArrayLike, z2: ArrayLike) -> np.ndarray:
    """True where (z1, z2) is the origin. Uses `hypot`, so tiny nonzero points are kept."""
    return np.hypot(z1, z2) <= ORIGIN_TOLERANCE


def arctan_star(z1: ArrayLike, z2: ArrayLike) -> ArrayLike:
    """Angle of the point (z1, z2), mapped into [0, 2π).

    Equivalent to the three-branch definition: arctan(z2/z1) for z1 ≥ 0, z2 ≥ 0;
    arctan(z2/z1) + 2π for z1 ≥ 0, z2 < 0; arctan(z2/z1) + π for z1 < 0.

    Args:
        z1: First (cosine) coordinate, scalar or array.
        z2: Second (sine) coordinate, broadcastable against `z1`.

    Returns:
        The angle(s) in [0, 2π); a float for scalar input.

    Raises:
        DomainError: If any (z1, z2) is the origin.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if np.any(at_origin(z1, z2)):
        raise DomainError("arctan_star is undefined at the origin (0, 0)")
    return wrap_angle(np.arctan2(z2, z1))


def arctan_star_grad(z1: ArrayLike, z2: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Partial derivatives of arctan_star with respect to z1 and z2."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    r2 = z1 * z1 + z2 * z2
    return -z2 / r2, z1 / r2


def circular_distance(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """Shortest arc length between angles, in [0, π]."""
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi)
    if np.ndim(d) == 0:
        return float(d)
    return d
