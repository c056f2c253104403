"""Blocked Gibbs samplers for SvM and SvM-c.

Each sweep draws the GP latents of every component by elliptical slice
sampling and then the (φ, ν) concentration block by HMC. SvM-c first draws
the labels ζ and the weights λ from their exact conditionals.
"""

import logging
from typing import Dict, Optional

import numpy as np

from src.dataset import Dataset
from src.errors import DomainError
from src.models.base_model import BaseModel
from src.models.param_state import ParamState
from src.models.spatial import SpatialVonMises
from src.models.spatial_cluster import SpatialClusterVonMises
from src.samplers.base_sampler import BaseSampler
from src.samplers.ess import ess_step
from src.samplers.hmc import AdaptiveHmc

logger = logging.getLogger(__name__)


def sample_labels(resp: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One categorical draw per column of a (K, N) responsibility matrix."""
    cdf = np.cumsum(resp, axis=0)
    u = rng.uniform(size=resp.shape[1]) * cdf[-1]
    return np.minimum((cdf < u[None, :]).sum(axis=0), resp.shape[0] - 1)


class SpatialSampler(BaseSampler):
    """ESS on z followed by HMC on (φ, ν); adds the ζ and λ Gibbs steps for SvM-c."""

    def __init__(self):
        super().__init__()

    def _initialize(self, model: BaseModel, data: Dataset, rng: np.random.Generator, init: Optional[ParamState]):
        if not isinstance(model, SpatialVonMises):
            raise DomainError(f"SpatialSampler cannot fit {model}")
        self.model = model
        self.data = data
        self.clustered = isinstance(model, SpatialClusterVonMises)
        self.cov = model.covariance(data)
        state = init.copy() if init is not None else model.sample_prior(data, rng)
        self.state = model.complete(state, data)
        if self.clustered and self.state.zeta is None:
            self.state.zeta = sample_labels(model.responsibilities(self.state, data), rng)
        dim = self.state.phi.size + self.state.nu.size
        self.kernel = AdaptiveHmc(self.hmc_config, self.n_warmup, dim)
        self.ess_exhausted = 0
        self.ess_evals = 0
        self.ess_steps = 0

    def _gibbs_labels(self, rng: np.random.Generator):
        resp = self.model.responsibilities(self.state, self.data)
        self.state.zeta = sample_labels(resp, rng)
        counts = np.bincount(self.state.zeta, minlength=self.model.K)
        self.state.lam = rng.dirichlet(1.0 + counts)

    def _transition(self, iteration: int, rng: np.random.Generator):
        model, data, state = self.model, self.data, self.state
        if self.clustered:
            self._gibbs_labels(rng)
        for k in range(model.K):
            mask = (state.zeta == k) if self.clustered else None

            def loglik(f, k=k, mask=mask):
                return model.component_log_likelihood(k, f, state, data, mask)

            result = ess_step(state.z[k], self.cov, loglik, rng, self.ess_config)
            state.z[k] = result.f
            self.ess_exhausted += int(result.exhausted)
            self.ess_evals += result.n_evals
            self.ess_steps += 1
        model.complete(state, data)
        q = np.concatenate([state.phi.ravel(), state.nu])

        def logp(q):
            return model.concentration_logp_and_grad(q, state, data, labeled=self.clustered)

        result = self.kernel.step(q, logp, rng, iteration)
        n_phi = state.phi.size
        state.phi = result.q[:n_phi].reshape(state.phi.shape)
        state.nu = np.array(result.q[n_phi:])

    def _snapshot(self) -> ParamState:
        return self.state.copy()

    def _finish_stats(self) -> Dict[str, float]:
        return {
            "hmc_accept_rate": self.kernel.acceptance_rate,
            "divergences": float(self.kernel.divergences),
            "step_size": self.kernel.config.step_size,
            "ess_exhausted": float(self.ess_exhausted),
            "ess_mean_evals": self.ess_evals / max(self.ess_steps, 1),
        }
