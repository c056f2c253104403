"""Piecewise-linear bracketing of logistic expectations under correlated normals.

The logistic ψ⁻¹(z) = 1/(1 + e^{−z}) is bracketed by
f(z) = 0 below −z_ε, (z + z_ε)/(2z_ε) on [−z_ε, z_ε] and 1 above z_ε.
For (Z_ℓ, Z_ℓ′) standard bivariate normal with correlation s, E[f(Z_ℓ)f(Z_ℓ′)]
has a closed form in φ, Φ and Owen's T, and
−w ≤ E[ψ⁻¹ψ⁻¹] − E[ff] ≤ 0 for s ≥ 0 with
w = 2ψ⁻¹(−z_ε)(Φ(−z_ε) + (½ − Φ(−z_ε))ψ⁻¹(z_ε)).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import expit, owens_t
from scipy.stats import norm

from src.errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_Z_EPS = 2.0
# |s| below this uses the independence factorisation E[f]² = ¼.
INDEPENDENCE_THRESHOLD = 1e-10


@dataclass(frozen=True)
class LogisticBoundInputs:
    """Correlation s of the unit-variance logit pair and the bracketing half-width z_ε."""

    s: float
    z_eps: float = DEFAULT_Z_EPS

    def __post_init__(self):
        if not -1.0 < self.s < 1.0:
            raise DomainError(f"Logit correlation must lie in (-1, 1), got {self.s}")
        if not 0.0 < self.z_eps <= 2.0:
            raise DomainError(f"z_eps must lie in (0, 2], got {self.z_eps}")

    @property
    def vartheta(self) -> float:
        """(1 − s²)z_ε/s; reported only, the closed forms below centre on s·z_ε."""
        if abs(self.s) < INDEPENDENCE_THRESHOLD:
            raise DomainError("vartheta is undefined at s = 0")
        return (1.0 - self.s**2) * self.z_eps / self.s

    @property
    def conditional_mean(self) -> float:
        """E[Z_ℓ | Z_ℓ′ = z_ε]."""
        return self.s * self.z_eps


@dataclass(frozen=True)
class LogisticProductBounds:
    lower: float
    upper: float
    f_product_expectation: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


def bracket(z: np.ndarray, z_eps: float = DEFAULT_Z_EPS) -> np.ndarray:
    """The piecewise-linear f(z) that brackets ψ⁻¹(z)."""
    return np.clip((np.asarray(z, dtype=float) + z_eps) / (2.0 * z_eps), 0.0, 1.0)


def bivariate_normal_cdf(h: float, k: float, s: float) -> float:
    """P(Z₁ ≤ h, Z₂ ≤ k) for a standard bivariate normal with correlation s, via Owen's T."""
    if not -1.0 < s < 1.0:
        raise DomainError(f"Correlation must lie in (-1, 1), got {s}")
    c = np.sqrt(1.0 - s * s)
    if h == 0.0 and k == 0.0:
        return 0.25 + float(np.arcsin(s)) / (2.0 * np.pi)
    if h == 0.0:
        return 0.5 * float(norm.cdf(k)) + float(owens_t(k, s / c))
    if k == 0.0:
        return 0.5 * float(norm.cdf(h)) + float(owens_t(h, s / c))
    beta = 0.0 if h * k > 0.0 else 0.5
    value = (
        0.5 * norm.cdf(h)
        + 0.5 * norm.cdf(k)
        - owens_t(h, (k - s * h) / (h * c))
        - owens_t(k, (h - s * k) / (k * c))
        - beta
    )
    return float(np.clip(value, 0.0, 1.0))


def _box_probabilities(a: float, s: float) -> Tuple[float, float, float]:
    """F(a, a), F(a, −a) and F(−a, −a) of the standard bivariate normal with correlation s."""
    c = np.sqrt(1.0 - s * s)
    t_same = float(owens_t(a, np.sqrt((1.0 - s) / (1.0 + s))))
    f_aa = float(norm.cdf(a)) - 2.0 * t_same
    f_mm = float(norm.cdf(-a)) - 2.0 * t_same
    f_am = 2.0 * float(owens_t(a, (1.0 + s) / c))
    return f_aa, f_am, f_mm


def _middle_probability(a: float, s: float) -> float:
    """P(|Z_ℓ| ≤ a, |Z_ℓ′| ≤ a)."""
    f_aa, f_am, f_mm = _box_probabilities(a, s)
    return f_aa - 2.0 * f_am + f_mm


def truncated_bivariate_terms(inputs: LogisticBoundInputs) -> Tuple[float, float]:
    """Closed forms of E_one = E[Z_ℓ 1{|Z_ℓ| ≤ z_ε, Z_ℓ′ > z_ε}] and E_two = E[Z_ℓ Z_ℓ′ 1{|Z_ℓ|, |Z_ℓ′| ≤ z_ε}].

    With a = z_ε, c = √(1 − s²), u = (1 − s)a/c, v = (1 + s)a/c and
    Q = φ(a)(Φ(u) − Φ(−v)):

        E_one = φ(a)(Φ(−v) − Φ(−u)) + sQ
        E_two = s·P(box) − 4saQ + 2cφ(a)(φ(u) − φ(v))

    Both follow from Z_ℓ | Z_ℓ′ = a being N(sa, c²).
    """
    a, s = inputs.z_eps, inputs.s
    c = np.sqrt(1.0 - s * s)
    u, v = (1.0 - s) * a / c, (1.0 + s) * a / c
    pdf_a = float(norm.pdf(a))
    q = pdf_a * float(norm.cdf(u) - norm.cdf(-v))
    e_one = pdf_a * float(norm.cdf(-v) - norm.cdf(-u)) + s * q
    e_two = s * _middle_probability(a, s) - 4.0 * s * a * q + 2.0 * c * pdf_a * float(norm.pdf(u) - norm.pdf(v))
    return float(e_one), float(e_two)


def f_product_expectation(inputs: LogisticBoundInputs) -> float:
    """E[f(Z_ℓ)f(Z_ℓ′)], split over the regions where each f is 0, linear or 1."""
    a, s = inputs.z_eps, inputs.s
    if abs(s) < INDEPENDENCE_THRESHOLD:
        return 0.25
    f_aa, f_am, f_mm = _box_probabilities(a, s)
    both_above = f_mm
    above_and_middle = float(norm.cdf(a)) - f_aa - float(norm.cdf(-a)) + f_am
    middle = f_aa - 2.0 * f_am + f_mm
    e_one, e_two = truncated_bivariate_terms(inputs)
    return both_above + above_and_middle + e_one / a + e_two / (4.0 * a * a) + 0.25 * middle


def bound_width(z_eps: float) -> float:
    """Largest gap between E[ψ⁻¹ψ⁻¹] and E[ff]."""
    tail = float(norm.cdf(-z_eps))
    return float(2.0 * expit(-z_eps) * (tail + (0.5 - tail) * expit(z_eps)))


def logistic_product_bounds(inputs: LogisticBoundInputs) -> LogisticProductBounds:
    """Brackets E[ψ⁻¹(Z_ℓ)ψ⁻¹(Z_ℓ′)] using E[f(Z_ℓ)f(Z_ℓ′)].

    For s ≥ 0 the f-product is the upper end. For s < 0, flipping Z_ℓ′ turns
    both expectations into ½ minus their value at −s, so the f-product becomes
    the lower end.
    """
    expected = f_product_expectation(inputs)
    width = bound_width(inputs.z_eps)
    if inputs.s >= 0.0 or abs(inputs.s) < INDEPENDENCE_THRESHOLD:
        return LogisticProductBounds(lower=expected - width, upper=expected, f_product_expectation=expected)
    return LogisticProductBounds(lower=expected, upper=expected + width, f_product_expectation=expected)


def logistic_expectation() -> float:
    """E[ψ⁻¹(Z)] for any zero-mean normal Z; ψ⁻¹ − ½ is odd."""
    return 0.5


def logistic_expectation_mc(
    n_samples: int, rng: Optional[np.random.Generator] = None, scale: float = 1.0
) -> Tuple[float, float]:
    """Monte-Carlo estimate and standard error of E[ψ⁻¹(Z)], Z ~ N(0, scale²)."""
    if n_samples < 2:
        raise DomainError(f"Need at least two samples, got {n_samples}")
    rng = rng if rng is not None else np.random.default_rng()
    values = expit(rng.normal(0.0, scale, size=n_samples))
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(n_samples))


def logistic_product_mc(
    inputs: LogisticBoundInputs, n_samples: int, rng: Optional[np.random.Generator] = None
) -> Tuple[float, float]:
    """Monte-Carlo estimate and standard error of E[ψ⁻¹(Z_ℓ)ψ⁻¹(Z_ℓ′)]."""
    if n_samples < 2:
        raise DomainError(f"Need at least two samples, got {n_samples}")
    rng = rng if rng is not None else np.random.default_rng()
    cov = np.array([[1.0, inputs.s], [inputs.s, 1.0]])
    z = rng.multivariate_normal(np.zeros(2), cov, size=n_samples)
    values = expit(z[:, 0]) * expit(z[:, 1])
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(n_samples))
