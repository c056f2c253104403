"""Defines the abstract base class for all MCMC samplers."""

import logging
import sys
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

import numpy as np
from tqdm import tqdm

from src.dataset import Dataset
from src.errors import ChainAbortedError, DomainError, NumericError
from src.models.base_model import BaseModel
from src.models.param_state import ParamState
from src.samplers.chain import Chain
from src.samplers.ess import EssConfig
from src.samplers.hmc import HmcConfig

logger = logging.getLogger(__name__)


class BaseSampler(ABC):
    """Abstract Base Class (ABC) for samplers that turn a model and data into a Chain.

    Subclasses implement `_initialize` (set up the run state), `_transition`
    (one full sweep) and `_snapshot` (copy of the current ParamState). The base
    class runs the warmup/keep/thin loop, progress reporting and failure handling.
    """

    DEFAULT_N_ITER = 10000
    DEFAULT_N_WARMUP = 5000
    DEFAULT_THIN = 5
    DEFAULT_STEP_SIZE = 0.05
    DEFAULT_LEAPFROG_STEPS = 10
    DEFAULT_TARGET_ACCEPT = 0.8
    DEFAULT_MAX_SHRINK_ITERS = 64
    DEFAULT_PARAMETRIZATION = "noncentered"

    @abstractmethod
    def __init__(self):
        """Abstract initializer; sets the shared defaults."""
        self.n_iter = self.DEFAULT_N_ITER
        self.n_warmup = self.DEFAULT_N_WARMUP
        self.thin = self.DEFAULT_THIN
        self.progress = True
        self.parametrization = self.DEFAULT_PARAMETRIZATION
        self.ess_config = EssConfig(self.DEFAULT_MAX_SHRINK_ITERS)
        self.hmc_config = HmcConfig(self.DEFAULT_STEP_SIZE, self.DEFAULT_LEAPFROG_STEPS)
        self.stats: Dict[str, float] = {}

    def configure(self, config: Dict[str, Any]):
        """Reads the sampler section of the configuration.

        Keys: `n_iter`, `n_warmup`, `thin`, `progress`, `parametrization`,
        `ess: {max_shrink_iters}` and `hmc: {step_size, leapfrog_steps, adapt, target_accept}`.
        """
        self.n_iter = int(config.get("n_iter", self.DEFAULT_N_ITER))
        self.n_warmup = int(config.get("n_warmup", self.DEFAULT_N_WARMUP))
        self.thin = int(config.get("thin", self.DEFAULT_THIN))
        self.progress = bool(config.get("progress", True))
        self.parametrization = config.get("parametrization", self.DEFAULT_PARAMETRIZATION)
        ess_cfg = config.get("ess", {}) or {}
        hmc_cfg = config.get("hmc", {}) or {}
        self.ess_config = EssConfig(int(ess_cfg.get("max_shrink_iters", self.DEFAULT_MAX_SHRINK_ITERS)))
        self.hmc_config = HmcConfig(
            step_size=float(hmc_cfg.get("step_size", self.DEFAULT_STEP_SIZE)),
            leapfrog_steps=int(hmc_cfg.get("leapfrog_steps", self.DEFAULT_LEAPFROG_STEPS)),
            adapt=bool(hmc_cfg.get("adapt", True)),
            target_accept=float(hmc_cfg.get("target_accept", self.DEFAULT_TARGET_ACCEPT)),
        )
        if not 0 <= self.n_warmup < self.n_iter:
            raise DomainError(f"Need 0 <= n_warmup < n_iter, got {self.n_warmup} and {self.n_iter}")
        if self.thin < 1:
            raise DomainError(f"thin must be >= 1, got {self.thin}")
        logger.info(
            f"{self.__class__.__name__} configured: {self.n_iter} iterations, {self.n_warmup} warmup, thin {self.thin}"
        )

    @property
    def n_keep(self) -> int:
        return (self.n_iter - self.n_warmup) // self.thin

    @abstractmethod
    def _initialize(self, model: BaseModel, data: Dataset, rng: np.random.Generator, init: Optional[ParamState]):
        raise NotImplementedError

    @abstractmethod
    def _transition(self, iteration: int, rng: np.random.Generator):
        raise NotImplementedError

    @abstractmethod
    def _snapshot(self) -> ParamState:
        raise NotImplementedError

    def _finish_stats(self) -> Dict[str, float]:
        return dict(self.stats)

    def sample(
        self,
        model: BaseModel,
        data: Dataset,
        rng: np.random.Generator,
        init: Optional[ParamState] = None,
        seed: int = 0,
        label: str = "chain",
    ) -> Chain:
        """Runs warmup then keeps every `thin`-th post-warmup draw.

        Raises:
            ChainAbortedError: On a numerical failure, carrying the draws kept so far.
        """
        if len(data) == 0:
            raise DomainError("Cannot sample with an empty dataset")
        self.stats = {}
        self._initialize(model, data, rng, init)
        draws: List[ParamState] = []
        show = self.progress and sys.stderr.isatty()
        logger.info(f"Starting {label} ({model.spec.name}, seed {seed})")
        try:
            for it in tqdm(range(self.n_iter), desc=label, unit=" it", leave=False, disable=not show):
                self._transition(it, rng)
                if it >= self.n_warmup and (it - self.n_warmup + 1) % self.thin == 0:
                    draws.append(self._snapshot())
        except (NumericError, FloatingPointError, np.linalg.LinAlgError) as e:
            logger.error(f"{label} aborted at a numerical failure: {e}", exc_info=True)
            partial = Chain(model.spec, draws, seed, self.n_warmup, len(draws), self.thin, self._finish_stats())
            raise ChainAbortedError(f"{label} aborted: {e}", partial_chain=partial) from e
        chain = Chain(model.spec, draws, seed, self.n_warmup, len(draws), self.thin, self._finish_stats())
        logger.info(f"Finished {label}: kept {len(draws)} draws, stats {chain.stats}")
        return chain
