"""Gaussian-process covariances, conditioning and the projected GP."""

from src.gp.conditional import ConditionalSampler, gp_conditional
from src.gp.covariance import CovMatrix, build_cov, factorize
from src.gp.kernel import GpSpec, sqexp_kernel, sqexp_kernel_matrix
from src.gp.projected import projected_gp_sample

__all__ = [
    "ConditionalSampler",
    "CovMatrix",
    "GpSpec",
    "build_cov",
    "factorize",
    "gp_conditional",
    "projected_gp_sample",
    "sqexp_kernel",
    "sqexp_kernel_matrix",
]
