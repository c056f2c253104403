"""Squared exponential kernel on simplex coordinates."""

from dataclasses import dataclass, replace
from typing import Union

import numpy as np
from scipy.spatial.distance import cdist

from src.errors import DomainError

MeanLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class GpSpec:
    """Kernel hyperparameters and the means of the two latent GP coordinates.

    Attributes:
        omega: Length scale ω.
        sigma: Marginal standard deviation σ; the kernel is σ² at zero distance.
        jitter: Diagonal term added before factorising. None means 1e-8·σ².
        mean1: Mean μ₁ of the first coordinate, a constant or one value per location.
        mean2: Mean μ₂ of the second coordinate.
    """

    omega: float = 0.1
    sigma: float = 1.0
    jitter: Union[float, None] = None
    mean1: MeanLike = 0.0
    mean2: MeanLike = 0.0

    def __post_init__(self):
        if not self.omega > 0.0:
            raise DomainError(f"GP length scale omega must be > 0, got {self.omega}")
        if not self.sigma > 0.0:
            raise DomainError(f"GP scale sigma must be > 0, got {self.sigma}")
        if self.jitter is not None and not self.jitter >= 0.0:
            raise DomainError(f"GP jitter must be >= 0, got {self.jitter}")

    @property
    def base_jitter(self) -> float:
        return 1e-8 * self.sigma**2 if self.jitter is None else float(self.jitter)

    @property
    def has_constant_means(self) -> bool:
        return np.ndim(self.mean1) == 0 and np.ndim(self.mean2) == 0

    def mean_vector(self, which: int, n: int) -> np.ndarray:
        """Mean of coordinate `which` (1 or 2) at n locations."""
        mean = self.mean1 if which == 1 else self.mean2
        if np.ndim(mean) == 0:
            return np.full(n, float(mean))
        mean = np.asarray(mean, dtype=float).reshape(-1)
        if mean.size != n:
            raise DomainError(f"GP mean vector has {mean.size} entries for {n} locations")
        return mean

    def with_means(self, mean1: MeanLike, mean2: MeanLike) -> "GpSpec":
        return replace(self, mean1=mean1, mean2=mean2)


def sqexp_kernel(x: np.ndarray, x2: np.ndarray, spec: GpSpec) -> float:
    """σ² exp(−‖x − x2‖² / (2ω²)) for two simplex points."""
    d2 = float(np.sum((np.asarray(x, dtype=float) - np.asarray(x2, dtype=float)) ** 2))
    return float(spec.sigma**2 * np.exp(-d2 / (2.0 * spec.omega**2)))


def sqexp_kernel_matrix(a: np.ndarray, b: np.ndarray, spec: GpSpec) -> np.ndarray:
    """Kernel evaluated between every row of `a` and every row of `b`."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[0]))
    d2 = cdist(a, b, metric="sqeuclidean")
    return spec.sigma**2 * np.exp(-d2 / (2.0 * spec.omega**2))
