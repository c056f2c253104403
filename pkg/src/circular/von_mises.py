"""Von Mises density, sampling and modified Bessel function ratios."""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import ive, logsumexp

from src.circular.angles import Angle, wrap_angle
from src.errors import DomainError

logger = logging.getLogger(__name__)

LOG_TWO_PI = float(np.log(2.0 * np.pi))

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class VonMisesParams:
    """Mean direction and concentration of a von Mises distribution.

    A concentration of 0 is the uniform distribution on the circle.
    """

    mean: Angle
    concentration: float

    def __post_init__(self):
        if not isinstance(self.mean, Angle):
            object.__setattr__(self, "mean", Angle(float(self.mean)))
        if not self.concentration >= 0.0:
            raise DomainError(f"von Mises concentration must be >= 0, got {self.concentration}")


def _check_rho(rho: ArrayLike) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0) or np.any(np.isnan(rho)):
        raise DomainError("Bessel arguments (concentrations) must be >= 0")
    return rho


def log_bessel_i0(rho: ArrayLike) -> ArrayLike:
    """log I_0(ρ) without overflow, via the exponentially scaled Bessel function."""
    rho = _check_rho(rho)
    out = np.log(ive(0, rho)) + rho
    return float(out) if out.ndim == 0 else out


def bessel_i_ratio(n: int, rho: ArrayLike) -> ArrayLike:
    """Ratio I_n(ρ) / I_0(ρ) of modified Bessel functions of the first kind.

    Both functions are evaluated with the common e^{-ρ} scaling, so the ratio
    stays finite for any concentration. Negative orders use I_{-n} = I_n.

    Args:
        n: Integer order.
        rho: Non-negative argument, scalar or array.

    Returns:
        The ratio in [0, 1); a float for scalar input.

    Raises:
        DomainError: If any `rho` is negative.
    """
    rho = _check_rho(rho)
    order = abs(int(n))
    out = ive(order, rho) / ive(0, rho)
    return float(out) if out.ndim == 0 else out


def inverse_bessel_ratio(r: float, upper: float = 1e6) -> float:
    """Solves I_1(ρ)/I_0(ρ) = r for ρ ≥ 0.

    Args:
        r: Target mean resultant length in [0, 1).
        upper: Largest concentration considered.

    Returns:
        The concentration ρ; 0 when r is 0 and `upper` when r is numerically 1.
    """
    if not 0.0 <= r < 1.0:
        raise DomainError(f"Mean resultant length must lie in [0, 1), got {r}")
    if r == 0.0:
        return 0.0
    if bessel_i_ratio(1, upper) <= r:
        logger.warning(f"Resultant length {r} is beyond the solvable range; clamping concentration to {upper}")
        return upper
    return float(brentq(lambda rho: bessel_i_ratio(1, rho) - r, 0.0, upper, xtol=1e-14, rtol=1e-14))


def vm_log_pdf(y: ArrayLike, mean: ArrayLike, concentration: ArrayLike) -> ArrayLike:
    """Vectorized von Mises log density ρ cos(y − m) − log(2π I_0(ρ))."""
    concentration = np.asarray(concentration, dtype=float)
    out = concentration * np.cos(np.asarray(y) - np.asarray(mean)) - LOG_TWO_PI - log_bessel_i0(concentration)
    return float(out) if np.ndim(out) == 0 else out


def vm_log_density(y: Union[Angle, float], p: VonMisesParams) -> float:
    """Log density of a single angle under `p`."""
    return float(vm_log_pdf(float(y), p.mean.value, p.concentration))


def vm_mixture_log_density(
    y: ArrayLike, means: np.ndarray, concentrations: np.ndarray, weights: np.ndarray
) -> ArrayLike:
    """log Σ_k λ_k vM(y; m_k, ρ_k), with component parameters along the first axis.

    `means`, `concentrations` and `weights` have shape (K,) or (K, N) and broadcast
    against `y` of shape () or (N,).
    """
    y = np.asarray(y, dtype=float)

    def per_component(a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        return a.reshape(a.shape + (1,) * y.ndim) if a.ndim == 1 else a

    comp = vm_log_pdf(y, per_component(means), per_component(concentrations))
    with np.errstate(divide="ignore"):
        log_w = np.log(per_component(weights))
    out = logsumexp(comp + log_w, axis=0)
    return float(out) if np.ndim(out) == 0 else out


def vm_sample(p: VonMisesParams, rng: np.random.Generator, size: Optional[int] = None) -> ArrayLike:
    """Draws from vM(α, ρ) with numpy's Best–Fisher rejection sampler.

    Args:
        p: Distribution parameters; ρ = 0 gives uniform draws.
        rng: Seeded numpy generator.
        size: Number of draws; None returns a single float.

    Returns:
        Angle(s) in [0, 2π).
    """
    draws = rng.vonmises(p.mean.value, p.concentration, size=size)
    return wrap_angle(draws)
