"""Covariance matrices with a cached Cholesky factor."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from src.dataset import validate_simplex_points
from src.errors import DomainError, NumericError
from src.gp.kernel import GpSpec, sqexp_kernel_matrix

logger = logging.getLogger(__name__)

# Largest jitter tried, relative to σ².
MAX_RELATIVE_JITTER = 1e-4
JITTER_GROWTH = 10.0


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric positive-definite matrix Σ = K + jitter·I and its lower Cholesky factor."""

    entries: np.ndarray
    chol: np.ndarray
    jitter: float = 0.0

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Σ⁻¹ b, with `b` of shape (n,) or (n, m)."""
        return cho_solve((self.chol, True), b)

    def whiten(self, x: np.ndarray) -> np.ndarray:
        """L⁻¹ x along the last axis of `x`."""
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.n)
        return solve_triangular(self.chol, flat.T, lower=True).T.reshape(x.shape)

    def quad_form(self, x: np.ndarray) -> np.ndarray:
        """xᵀ Σ⁻¹ x along the last axis of `x`."""
        w = self.whiten(x)
        return np.sum(w * w, axis=-1)

    def log_det(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.chol))))

    def log_density(self, x: np.ndarray) -> np.ndarray:
        """Zero-mean Gaussian log density N(x; 0, Σ) along the last axis."""
        return -0.5 * (self.quad_form(x) + self.log_det() + self.n * np.log(2.0 * np.pi))


def _reciprocal_condition(matrix: np.ndarray) -> Optional[float]:
    try:
        return float(1.0 / np.linalg.cond(matrix))
    except (LinAlgError, ZeroDivisionError, FloatingPointError):
        return None


def factorize(entries: np.ndarray, jitter: float, max_jitter: float, label: str = "covariance") -> CovMatrix:
    """Cholesky-factorises `entries + jitter·I`, growing the jitter ×10 until `max_jitter`.

    A zero `jitter` disables escalation.

    Raises:
        NumericError: If no jitter in the schedule gives a positive-definite matrix.
    """
    entries = 0.5 * (entries + entries.T)
    n = entries.shape[0]
    current = float(jitter)
    while True:
        jittered = entries + current * np.eye(n)
        try:
            chol = cholesky(jittered, lower=True, check_finite=True)
            return CovMatrix(entries=jittered, chol=chol, jitter=current)
        except (LinAlgError, ValueError):
            if current <= 0.0 or current * JITTER_GROWTH > max_jitter * (1.0 + 1e-12):
                condition = _reciprocal_condition(jittered)
                raise NumericError(
                    f"Cholesky factorisation of the {label} failed with jitter {current:.3g}",
                    condition=condition,
                ) from None
            current *= JITTER_GROWTH
            logger.warning(f"Cholesky of the {label} failed; escalating jitter to {current:.3g}")


def build_cov(locs: np.ndarray, spec: GpSpec) -> CovMatrix:
    """Builds Σ_{ℓℓ'} = K(x_ℓ, x_ℓ') plus jitter and factorises it.

    Args:
        locs: Simplex points, shape (n, 3).
        spec: Kernel hyperparameters.

    Returns:
        CovMatrix with exactly symmetric entries and a cached Cholesky factor.

    Raises:
        DomainError: If no locations are given.
        NumericError: If factorisation fails after jitter escalation.
    """
    locs = validate_simplex_points(locs)
    if locs.shape[0] == 0:
        raise DomainError("build_cov needs at least one location")
    k = sqexp_kernel_matrix(locs, locs, spec)
    return factorize(k, spec.base_jitter, MAX_RELATIVE_JITTER * spec.sigma**2)
