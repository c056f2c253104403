"""Closed-form prior moments and correlations of the spatial von Mises models."""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.circular.angles import Angle, arctan_star
from src.circular.projected_normal import Pn2Params, pn2_circular_variance
from src.circular.von_mises import bessel_i_ratio
from src.errors import DomainError
from src.theory.logistic import DEFAULT_Z_EPS, LogisticBoundInputs, logistic_product_bounds

logger = logging.getLogger(__name__)

# Resultants and denominators below this are treated as zero.
DEGENERATE_TOLERANCE = 1e-12
SIMPLEX_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PriorCorrelation:
    """Circular correlation between two sites; `degenerate` flags a vanishing numerator and denominator."""

    value: float
    degenerate: bool = False

    def __float__(self) -> float:
        return self.value


def _mixture_arrays(ms: Sequence[float], rhos: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    m = np.asarray([float(x) for x in ms], dtype=float)
    rho = np.asarray(rhos, dtype=float)
    if m.ndim != 1 or m.shape != rho.shape or m.size == 0:
        raise DomainError(f"Component means and concentrations must be matching 1-D arrays, got {m.shape} and {rho.shape}")
    if np.any(rho < 0.0):
        raise DomainError("Concentrations must be >= 0")
    return m, rho


def _check_probabilities(p: np.ndarray, what: str) -> np.ndarray:
    if np.any(p < 0.0) or abs(p.sum() - 1.0) > SIMPLEX_TOLERANCE:
        raise DomainError(f"{what} must be non-negative and sum to 1, got sum {p.sum()}")
    return p


def svm_prior_moments(mu0: float, alpha_mu: float, sigma: float, rho: float) -> Tuple[Angle, float]:
    """Prior mean and circular variance of one SvM observation.

    The mean is α_μ exactly. The variance is
    1 − I₁/I₀(ρ)·√(πβ/2)e^{−β}(I₀(β) + I₁(β)) with β = μ₀²/(4σ²), i.e. the von
    Mises noise shrinks the mean resultant of the projected-normal mean direction.
    """
    if mu0 < 0.0 or sigma <= 0.0 or rho < 0.0:
        raise DomainError(f"svm_prior_moments needs mu0 >= 0, sigma > 0, rho >= 0; got {mu0}, {sigma}, {rho}")
    pn2 = Pn2Params.from_polar(mu0, alpha_mu, sigma)
    resultant = bessel_i_ratio(1, rho) * (1.0 - pn2_circular_variance(pn2))
    return Angle(alpha_mu), float(np.clip(1.0 - resultant, 0.0, 1.0))


def svmp_prior_moments(ms: Sequence[float], rhos: Sequence[float], probs: Sequence[float]) -> Tuple[Angle, float]:
    """Mean and circular variance of a von Mises mixture with fixed membership probabilities.

    α = arctan*(Σ p A(ρ) cos m, Σ p A(ρ) sin m) and the variance is
    1 − Σ p A(ρ) cos(m − α), A = I₁/I₀. A vanishing resultant reports (π, 1).
    """
    m, rho = _mixture_arrays(ms, rhos)
    p = _check_probabilities(np.asarray(probs, dtype=float), "Membership probabilities")
    if p.shape != m.shape:
        raise DomainError(f"Expected {m.size} probabilities, got {p.size}")
    weight = p * bessel_i_ratio(1, rho)
    c, s = float(np.dot(weight, np.cos(m))), float(np.dot(weight, np.sin(m)))
    if np.hypot(c, s) < DEGENERATE_TOLERANCE:
        logger.debug("Mixture resultant vanishes; reporting mean pi and variance 1")
        return Angle(np.pi), 1.0
    alpha = float(arctan_star(c, s))
    variance = 1.0 - float(np.dot(weight, np.cos(m - alpha)))
    return Angle(alpha), float(np.clip(variance, 0.0, 1.0))


def svmp_prior_correlation(ms: Sequence[float], rhos: Sequence[float], joint: np.ndarray) -> PriorCorrelation:
    """Circular correlation of two SvM-p observations given the joint membership law.

    Both sites share the marginal of `joint` and hence the mean α. The value is
    ΣΣ P(k, k′) A_k A_k′ (cos(m_k − m_k′) − cos(m_k + m_k′ − 2α)) / s with
    s = 1 − Σ p_k I₂/I₀(ρ_k) cos 2(m_k − α).

    Args:
        ms: Component mean directions.
        rhos: Component concentrations.
        joint: K×K matrix of P(ζ_ℓ = k, ζ_ℓ′ = k′).

    Raises:
        DomainError: If `joint` is not a symmetric-margined K×K probability table.
    """
    m, rho = _mixture_arrays(ms, rhos)
    P = np.asarray(joint, dtype=float)
    if P.shape != (m.size, m.size):
        raise DomainError(f"Joint membership table must be {m.size}x{m.size}, got {P.shape}")
    _check_probabilities(P.ravel(), "Joint membership probabilities")
    p_row, p_col = P.sum(axis=1), P.sum(axis=0)
    if not np.allclose(p_row, p_col, atol=SIMPLEX_TOLERANCE):
        raise DomainError("Joint membership table must have equal row and column margins")
    if m.size == 1:
        return PriorCorrelation(0.0, degenerate=True)

    alpha, _ = svmp_prior_moments(m, rho, p_row / p_row.sum())
    a = alpha.value
    A = bessel_i_ratio(1, rho)
    cross = np.cos(m[:, None] - m[None, :]) - np.cos(m[:, None] + m[None, :] - 2.0 * a)
    numerator = float(np.sum(P * np.outer(A, A) * cross))
    spread = 1.0 - float(np.dot(p_row, bessel_i_ratio(2, rho) * np.cos(2.0 * (m - a))))
    if spread < DEGENERATE_TOLERANCE:
        return PriorCorrelation(0.0, degenerate=True)
    return PriorCorrelation(float(np.clip(numerator / spread, -1.0, 1.0)))


def svmp2_prior_moments(m1: float, m2: float, rho1: float, rho2: float) -> Tuple[Angle, float]:
    """Two-component SvM-p moments; with a zero-mean logit field E[λ₁] = ½."""
    return svmp_prior_moments([m1, m2], [rho1, rho2], [0.5, 0.5])


def _two_component_joint(same: float) -> np.ndarray:
    return np.array([[same, 0.5 - same], [0.5 - same, same]])


def svmp2_prior_correlation(
    m1: float, m2: float, rho1: float, rho2: float, s: float, z_eps: float = DEFAULT_Z_EPS
) -> Tuple[float, float]:
    """Brackets the two-component SvM-p correlation between sites with logit correlation s.

    The joint membership table is [[e, ½ − e], [½ − e, e]] with
    e = E[ψ⁻¹(Z_ℓ)ψ⁻¹(Z_ℓ′)]. The correlation is linear in e, so evaluating it at
    the logistic-product bounds on e gives the bracket. (m, ρ) are fixed values
    standing in for their prior expectations.

    Returns:
        (lower, upper) correlation.
    """
    bounds = logistic_product_bounds(LogisticBoundInputs(s, z_eps))
    values = [
        svmp_prior_correlation([m1, m2], [rho1, rho2], _two_component_joint(e)).value
        for e in (bounds.lower, bounds.upper)
    ]
    return min(values), max(values)
