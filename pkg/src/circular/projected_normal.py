"""Projected normal (PN2) distribution with isotropic covariance σ²I."""

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import ive
from scipy.stats import norm

from src.circular.angles import Angle, arctan_star
from src.errors import DomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class Pn2Params:
    """Mean vector μ and isotropic standard deviation σ of the underlying bivariate normal.

    `mu0` and `alpha_mu` are the polar form of μ; `alpha_mu` is π when μ = 0,
    the convention for the uniform case.
    """

    mu: tuple
    sigma: float
    mu0: float = field(init=False)
    alpha_mu: Angle = field(init=False)

    def __post_init__(self):
        mu = tuple(float(v) for v in self.mu)
        if len(mu) != 2:
            raise DomainError(f"PN2 mean must be a 2-vector, got {self.mu}")
        if not self.sigma > 0.0:
            raise DomainError(f"PN2 sigma must be > 0, got {self.sigma}")
        object.__setattr__(self, "mu", mu)
        mu0 = float(np.hypot(*mu))
        object.__setattr__(self, "mu0", mu0)
        object.__setattr__(self, "alpha_mu", Angle(arctan_star(*mu)) if mu0 > 0.0 else Angle(np.pi))

    @classmethod
    def from_polar(cls, mu0: float, alpha: float, sigma: float) -> "Pn2Params":
        return cls((mu0 * np.cos(alpha), mu0 * np.sin(alpha)), sigma)


def pn2_density(y: ArrayLike, p: Pn2Params) -> ArrayLike:
    """Closed-form PN2 density φ(b)(φ(a) + aΦ(a)).

    Here a = μ0 cos(y − α)/σ and b = μ0 sin(y − α)/σ.
    """
    delta = np.asarray(y, dtype=float) - p.alpha_mu.value
    a = p.mu0 * np.cos(delta) / p.sigma
    b = p.mu0 * np.sin(delta) / p.sigma
    out = norm.pdf(b) * (norm.pdf(a) + a * norm.cdf(a))
    return float(out) if np.ndim(out) == 0 else out


def pn2_circular_variance(p: Pn2Params) -> float:
    """Circular variance 1 − ½√(2πβ) e^{−β}(I_0(β) + I_1(β)) with β = μ0²/(4σ²)."""
    beta = p.mu0**2 / (4.0 * p.sigma**2)
    resultant = np.sqrt(np.pi * beta / 2.0) * (ive(0, beta) + ive(1, beta))
    return float(np.clip(1.0 - resultant, 0.0, 1.0))


def pn2_sample(p: Pn2Params, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draws n angles by projecting N(μ, σ²I) draws onto the circle."""
    z = rng.normal(loc=p.mu, scale=p.sigma, size=(n, 2))
    return arctan_star(z[:, 0], z[:, 1])
