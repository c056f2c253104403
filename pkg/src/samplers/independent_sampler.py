"""HMC sampler for the non-spatial iV and iVM models."""

import logging
from typing import Dict, Optional

import numpy as np

from src.dataset import Dataset
from src.errors import DomainError
from src.models.base_model import BaseModel
from src.models.independent import IndependentVonMises
from src.models.param_state import ParamState
from src.samplers.base_sampler import BaseSampler
from src.samplers.hmc import AdaptiveHmc

logger = logging.getLogger(__name__)


class IndependentSampler(BaseSampler):
    """Joint HMC on (m, log ρ, mixing logits) with the labels marginalised."""

    DEFAULT_N_ITER = 2000
    DEFAULT_N_WARMUP = 1000
    DEFAULT_THIN = 1

    def __init__(self):
        super().__init__()

    def _initialize(self, model: BaseModel, data: Dataset, rng: np.random.Generator, init: Optional[ParamState]):
        if not isinstance(model, IndependentVonMises):
            raise DomainError(f"IndependentSampler cannot fit {model}")
        self.model = model
        self.data = data
        state = init.copy() if init is not None else model.sample_prior(data, rng)
        self.q = model.pack(state)
        self.kernel = AdaptiveHmc(self.hmc_config, self.n_warmup, self.q.size)

    def _transition(self, iteration: int, rng: np.random.Generator):
        result = self.kernel.step(self.q, lambda q: self.model.logp_and_grad(q, self.data), rng, iteration)
        self.q = result.q

    def _snapshot(self) -> ParamState:
        return self.model.unpack(self.q)

    def _finish_stats(self) -> Dict[str, float]:
        return {
            "hmc_accept_rate": self.kernel.acceptance_rate,
            "divergences": float(self.kernel.divergences),
            "step_size": self.kernel.config.step_size,
        }
