"""Conditional (kriging) distribution of GP values at new locations."""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from src.dataset import validate_simplex_points
from src.errors import DomainError
from src.gp.covariance import MAX_RELATIVE_JITTER, CovMatrix, build_cov, factorize
from src.gp.kernel import GpSpec, sqexp_kernel_matrix

logger = logging.getLogger(__name__)

MeanLike = Union[float, np.ndarray]


def _as_locs(locs: np.ndarray) -> np.ndarray:
    arr = np.asarray(locs, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 3))
    return validate_simplex_points(arr)


def gp_conditional(
    train_locs: np.ndarray,
    test_locs: np.ndarray,
    train_vals: np.ndarray,
    spec: GpSpec,
    train_mean: MeanLike = 0.0,
    test_mean: MeanLike = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of the GP at `test_locs` given its values at `train_locs`.

    Uses the partitioned multivariate normal formula
    μ* + K*ᵀ Σ⁻¹ (f − μ) and K** − K*ᵀ Σ⁻¹ K*, where Σ includes the jitter.
    With no training locations the prior is returned.

    Raises:
        DomainError: If `train_vals` does not match `train_locs`.
        NumericError: If the training covariance cannot be factorised.
    """
    train = _as_locs(train_locs)
    test = _as_locs(test_locs)
    vals = np.asarray(train_vals, dtype=float).reshape(-1)
    if vals.size != train.shape[0]:
        raise DomainError(f"{vals.size} training values for {train.shape[0]} training locations")
    mean_test = np.broadcast_to(np.asarray(test_mean, dtype=float), (test.shape[0],)).copy()
    k_tt = sqexp_kernel_matrix(test, test, spec)
    if train.shape[0] == 0:
        return mean_test, k_tt
    cov = build_cov(train, spec)
    k_star = sqexp_kernel_matrix(train, test, spec)
    resid = vals - np.broadcast_to(np.asarray(train_mean, dtype=float), vals.shape)
    mean = mean_test + k_star.T @ cov.solve(resid)
    w = cov.whiten(k_star.T)
    cond = k_tt - w @ w.T
    return mean, 0.5 * (cond + cond.T)


class ConditionalSampler:
    """Draws GP values at test locations given many sets of training values.

    The cross-covariance solve and the conditional Cholesky factor are computed
    once per (train, test) pair, so each draw costs two matrix products.
    """

    def __init__(self, train_locs: np.ndarray, test_locs: np.ndarray, spec: GpSpec, train_cov: Optional[CovMatrix] = None):
        train = _as_locs(train_locs)
        test = _as_locs(test_locs)
        self.n_train = train.shape[0]
        self.n_test = test.shape[0]
        k_tt = sqexp_kernel_matrix(test, test, spec)
        if self.n_train == 0:
            self.weights = np.zeros((self.n_test, 0))
            cond = k_tt
        else:
            cov = train_cov if train_cov is not None else build_cov(train, spec)
            k_star = sqexp_kernel_matrix(train, test, spec)
            self.weights = cov.solve(k_star).T
            w = cov.whiten(k_star.T)
            cond = k_tt - w @ w.T
        self.cond_cov = factorize(
            cond, spec.base_jitter, MAX_RELATIVE_JITTER * spec.sigma**2, label="conditional covariance"
        )
        logger.debug(
            f"ConditionalSampler ready: {self.n_train} train, {self.n_test} test, jitter {self.cond_cov.jitter:.3g}"
        )

    def mean(self, train_vals: np.ndarray) -> np.ndarray:
        """Conditional mean for zero-mean training values of shape (..., n_train)."""
        return np.asarray(train_vals, dtype=float) @ self.weights.T

    def sample(self, train_vals: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One conditional draw per leading index of `train_vals` (zero-mean deviations)."""
        mean = self.mean(train_vals)
        eps = rng.standard_normal(mean.shape)
        return mean + eps @ self.cond_cov.chol.T
