"""Sampling the projected Gaussian process."""

import logging
from typing import Optional, Tuple

import numpy as np

from src.circular.angles import arctan_star, at_origin
from src.errors import NumericError
from src.gp.covariance import CovMatrix, build_cov
from src.gp.kernel import GpSpec

logger = logging.getLogger(__name__)

MAX_REDRAWS = 100


def projected_gp_sample(
    spec: GpSpec, locs: np.ndarray, rng: np.random.Generator, cov: Optional[CovMatrix] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draws Z₁ ~ GP(μ₁, Σ), Z₂ ~ GP(μ₂, Σ) and returns their angles.

    Both coordinates share Σ and its Cholesky factor. A draw that lands exactly
    on the origin at any location is redrawn.

    Args:
        spec: Kernel hyperparameters and coordinate means.
        locs: Simplex points, shape (n, 3).
        rng: Seeded numpy generator.
        cov: Optional prebuilt covariance for `locs`.

    Returns:
        Tuple of (angles, z1, z2), each of shape (n,); z1 and z2 include the means.
    """
    cov = cov if cov is not None else build_cov(locs, spec)
    n = cov.n
    mu1 = spec.mean_vector(1, n)
    mu2 = spec.mean_vector(2, n)
    for _ in range(MAX_REDRAWS):
        eps = rng.standard_normal((2, n))
        z = eps @ cov.chol.T
        z1, z2 = z[0] + mu1, z[1] + mu2
        if not np.any(at_origin(z1, z2)):
            return arctan_star(z1, z2), z1, z2
        logger.debug("Projected GP draw hit the origin; redrawing")
    raise NumericError("Projected GP draw repeatedly hit the origin")
