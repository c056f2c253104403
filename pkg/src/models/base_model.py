"""Defines the abstract base class for all direction models."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.dataset import Dataset
from src.errors import DomainError
from src.gp.covariance import CovMatrix, build_cov
from src.models.model_spec import HierarchicalPrior, ModelSpec
from src.models.param_state import ParamState

LOG_SQRT_TWO_PI = 0.5 * float(np.log(2.0 * np.pi))


class BaseModel(ABC):
    """Abstract Base Class (ABC) defining the interface for direction models.

    Concrete models (iV/iVM, SvM, SvM-c, SvM-p) implement `configure`, the
    likelihood, the prior and a prior draw. `log_posterior` is their sum.
    Spatial models cache the GP covariance of the last dataset they saw.
    """

    @abstractmethod
    def __init__(self):
        """Abstract initializer; concrete models set `self.spec` here."""
        self.spec: Optional[ModelSpec] = None
        self._cov_cache: Optional[Tuple[bytes, CovMatrix]] = None

    @abstractmethod
    def configure(self, config: Dict[str, Any]):
        """Builds `self.spec` from a model config section.

        Args:
            config: The section for this model, e.g. `config['models']['svm']`.
        """
        raise NotImplementedError

    @abstractmethod
    def log_likelihood(self, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        """Log probability of the observed directions given the latents."""
        raise NotImplementedError

    @abstractmethod
    def log_prior(self, state: ParamState, data: Dataset) -> float:
        """Log prior density of the latents (up to the model's fixed constants)."""
        raise NotImplementedError

    @abstractmethod
    def sample_prior(self, data: Dataset, rng: np.random.Generator) -> ParamState:
        """Draws a full latent configuration from the prior at the data locations."""
        raise NotImplementedError

    def log_posterior(self, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        self.check_finite(state)
        return self.log_likelihood(state, data, marginalize) + self.log_prior(state, data)

    def complete(self, state: ParamState, data: Dataset) -> ParamState:
        """Fills derived fields (m from z, λ from logits) in place and returns the state."""
        return state

    @staticmethod
    def check_finite(state: ParamState):
        if state.phi is not None and not np.all(np.isfinite(state.phi)):
            raise DomainError("Log-concentrations phi must be finite")

    def covariance(self, data: Dataset) -> CovMatrix:
        """GP covariance at the data locations, rebuilt only when the locations change."""
        key = np.ascontiguousarray(data.locations).tobytes()
        if self._cov_cache is None or self._cov_cache[0] != key:
            self._cov_cache = (key, build_cov(data.locations, self.spec.gp))
        return self._cov_cache[1]

    @staticmethod
    def observation_weights(data: Dataset) -> np.ndarray:
        return np.ones(len(data)) if data.weights is None else data.weights

    def __str__(self) -> str:
        return f"{self.__class__.__name__}({self.spec.name if self.spec else 'unconfigured'})"


def hierarchical_log_prior(phi: np.ndarray, nu: np.ndarray, prior: HierarchicalPrior) -> float:
    """Σ log N(φ_kℓ; ν_k, ς²) + Σ log N(ν_k; 0, τ²) for φ of shape (K, N) and ν of shape (K,)."""
    phi = np.atleast_2d(phi)
    nu = np.asarray(nu, dtype=float).reshape(-1)
    s2, t2 = prior.varsigma**2, prior.tau**2
    lp_phi = -0.5 * np.sum((phi - nu[:, None]) ** 2) / s2 - phi.size * (LOG_SQRT_TWO_PI + np.log(prior.varsigma))
    lp_nu = -0.5 * np.sum(nu**2) / t2 - nu.size * (LOG_SQRT_TWO_PI + np.log(prior.tau))
    return float(lp_phi + lp_nu)


def hierarchical_grads(phi: np.ndarray, nu: np.ndarray, prior: HierarchicalPrior) -> Tuple[np.ndarray, np.ndarray]:
    """Prior parts of ∂/∂φ and ∂/∂ν: −(φ − ν)/ς² and Σ(φ − ν)/ς² − ν/τ²."""
    phi = np.atleast_2d(phi)
    nu = np.asarray(nu, dtype=float).reshape(-1)
    diff = (phi - nu[:, None]) / prior.varsigma**2
    return -diff, diff.sum(axis=1) - nu / prior.tau**2
