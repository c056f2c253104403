"""MCMC kernels, model samplers, chains and posterior summaries."""

from src.samplers.base_sampler import BaseSampler
from src.samplers.chain import Chain, chain_diagnostics, max_r_hat, scalar_functionals
from src.samplers.ess import EssConfig, EssResult, ess_step
from src.samplers.hmc import AdaptiveHmc, DualAveraging, HmcConfig, HmcResult, hmc_step, leapfrog
from src.samplers.independent_sampler import IndependentSampler
from src.samplers.runner import (
    FIT_FUNCTIONS,
    R_HAT_WARNING,
    chain_seeds,
    create_sampler,
    fit_independent,
    fit_svm,
    fit_svmc,
    fit_svmp,
    run_chains,
)
from src.samplers.summary import circular_interval, component_order, summarize_chain
from src.samplers.svm_sampler import SpatialSampler, sample_labels
from src.samplers.svmp_sampler import SvmpSampler

__all__ = [
    "FIT_FUNCTIONS",
    "R_HAT_WARNING",
    "AdaptiveHmc",
    "BaseSampler",
    "Chain",
    "DualAveraging",
    "EssConfig",
    "EssResult",
    "HmcConfig",
    "HmcResult",
    "IndependentSampler",
    "SpatialSampler",
    "SvmpSampler",
    "chain_diagnostics",
    "chain_seeds",
    "circular_interval",
    "component_order",
    "create_sampler",
    "ess_step",
    "fit_independent",
    "fit_svm",
    "fit_svmc",
    "fit_svmp",
    "hmc_step",
    "leapfrog",
    "max_r_hat",
    "run_chains",
    "sample_labels",
    "scalar_functionals",
    "summarize_chain",
]
