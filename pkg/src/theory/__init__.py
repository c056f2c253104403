"""Closed-form prior moments, logistic bounds and their Monte-Carlo oracles."""

from src.theory.logistic import (
    DEFAULT_Z_EPS,
    LogisticBoundInputs,
    LogisticProductBounds,
    bivariate_normal_cdf,
    bound_width,
    bracket,
    f_product_expectation,
    logistic_expectation,
    logistic_expectation_mc,
    logistic_product_bounds,
    logistic_product_mc,
    truncated_bivariate_terms,
)
from src.theory.moments import (
    PriorCorrelation,
    svm_prior_moments,
    svmp2_prior_correlation,
    svmp2_prior_moments,
    svmp_prior_correlation,
    svmp_prior_moments,
)
from src.theory.monte_carlo import (
    MonteCarloEstimate,
    SvmGenerator,
    SvmpGenerator,
    UniformGenerator,
    VonMisesGenerator,
    VonMisesMixtureGenerator,
    mc_moment_oracle,
)

__all__ = [
    "DEFAULT_Z_EPS",
    "LogisticBoundInputs",
    "LogisticProductBounds",
    "MonteCarloEstimate",
    "PriorCorrelation",
    "SvmGenerator",
    "SvmpGenerator",
    "UniformGenerator",
    "VonMisesGenerator",
    "VonMisesMixtureGenerator",
    "bivariate_normal_cdf",
    "bound_width",
    "bracket",
    "f_product_expectation",
    "logistic_expectation",
    "logistic_expectation_mc",
    "logistic_product_bounds",
    "logistic_product_mc",
    "mc_moment_oracle",
    "svm_prior_moments",
    "svmp2_prior_correlation",
    "svmp2_prior_moments",
    "svmp_prior_correlation",
    "svmp_prior_moments",
]
