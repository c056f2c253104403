"""Joint HMC sampler for SvM-p."""

import logging
from typing import Dict, Optional

import numpy as np

from src.dataset import Dataset
from src.errors import DomainError
from src.models.base_model import BaseModel
from src.models.param_state import ParamState
from src.models.spatial import check_parametrization
from src.models.spatial_prob import SpatialProbVonMises
from src.samplers.base_sampler import BaseSampler
from src.samplers.hmc import AdaptiveHmc

logger = logging.getLogger(__name__)


class SvmpSampler(BaseSampler):
    """HMC on [z or z̃, m, log ρ]; the non-centered parametrization is the default."""

    DEFAULT_N_ITER = 2000
    DEFAULT_N_WARMUP = 1000
    DEFAULT_THIN = 1
    DEFAULT_LEAPFROG_STEPS = 20

    def __init__(self):
        super().__init__()

    def _initialize(self, model: BaseModel, data: Dataset, rng: np.random.Generator, init: Optional[ParamState]):
        if not isinstance(model, SpatialProbVonMises):
            raise DomainError(f"SvmpSampler cannot fit {model}")
        check_parametrization(self.parametrization)
        self.model = model
        self.data = data
        state = init.copy() if init is not None else model.sample_prior(data, rng)
        self.q = model.pack(state, data, self.parametrization)
        self.kernel = AdaptiveHmc(self.hmc_config, self.n_warmup, self.q.size)
        logger.debug(f"SvM-p HMC over {self.q.size} coordinates ({self.parametrization})")

    def _transition(self, iteration: int, rng: np.random.Generator):
        def logp(q):
            return self.model.logp_and_grad(q, self.data, self.parametrization)

        self.q = self.kernel.step(self.q, logp, rng, iteration).q

    def _snapshot(self) -> ParamState:
        return self.model.unpack(self.q, self.data, self.parametrization)

    def _finish_stats(self) -> Dict[str, float]:
        return {
            "hmc_accept_rate": self.kernel.acceptance_rate,
            "divergences": float(self.kernel.divergences),
            "step_size": self.kernel.config.step_size,
        }
