"""SvM-c: a mixture of spatial von Mises components with shared mixing weights."""

import logging
from typing import Any, Dict, Optional

import numpy as np
from scipy.special import gammaln, softmax

from src.dataset import Dataset
from src.errors import DomainError
from src.models.model_spec import HierarchicalPrior, ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.models.spatial import SpatialVonMises, _as_mean

logger = logging.getLogger(__name__)


def spread_means(K: int, radius: float = 1.0):
    """K GP means evenly spaced on a circle, the first pointing to π/2."""
    angles = np.pi / 2.0 + 2.0 * np.pi * np.arange(K) / K
    return tuple((float(np.round(radius * np.cos(a), 15)), float(np.round(radius * np.sin(a), 15))) for a in angles)


class SpatialClusterVonMises(SpatialVonMises):
    """SvM-c: y_ℓ | ζ_ℓ = k ~ vM(m_kℓ, e^{φ_kℓ}), P(ζ_ℓ = k) = λ_k.

    Each component has its own projected GP (shared kernel, own means μ_k) and
    its own hierarchical concentration field. λ ~ Dirichlet(1). Likelihoods and
    gradients are available with labels marginalised (responsibility weights)
    or conditioned on ζ (indicator weights).
    """

    KIND = ModelKind.SVMC
    DEFAULT_K = 2
    DEFAULT_SIGMA = 0.5

    def configure(self, config: Dict[str, Any]):
        """Reads the SvM keys plus `K` and `component_means: [[μ₁, μ₂], ...]`."""
        K = int(config.get("K", self.DEFAULT_K))
        means = config.get("component_means")
        if means is None:
            means = spread_means(K)
        means = tuple((_as_mean(pair[0]), _as_mean(pair[1])) for pair in means)
        self.spec = ModelSpec(
            kind=self.KIND,
            K=K,
            gp=self._gp_from_config(config, (0.0, 0.0)),
            conc_prior=HierarchicalPrior(
                varsigma=float(config.get("varsigma", self.DEFAULT_VARSIGMA)),
                tau=float(config.get("tau", self.DEFAULT_TAU)),
            ),
            component_means=means,
        )
        self._cov_cache = None
        logger.debug(f"{self} configured with K={K}, component means {means}")

    def _lam(self, state: ParamState) -> np.ndarray:
        lam = np.asarray(state.lam, dtype=float).reshape(-1)
        if lam.size != self.K:
            raise DomainError(f"Expected {self.K} mixing weights, got {lam.size}")
        return lam

    def _labels(self, state: ParamState, n: int) -> np.ndarray:
        if state.zeta is None:
            raise DomainError("Labelled SvM-c evaluation needs zeta")
        zeta = np.asarray(state.zeta, dtype=int).reshape(-1)
        if zeta.size != n or np.any(zeta < 0) or np.any(zeta >= self.K):
            raise DomainError(f"zeta must hold {n} labels in 0..{self.K - 1}")
        return zeta

    def mixing_log_weights(self, state: ParamState) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self._lam(state))[:, None]

    def _log_likelihood_from_means(self, m, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        if marginalize:
            return super()._log_likelihood_from_means(m, state, data, True)
        n = len(data)
        zeta = self._labels(state, n)
        comp = self.component_log_densities(m, state.phi, data)
        return float(np.dot(self.observation_weights(data), comp[zeta, np.arange(n)]))

    def label_log_prior(self, state: ParamState, n: int) -> float:
        """Σ_ℓ log λ_{ζ_ℓ}."""
        with np.errstate(divide="ignore"):
            return float(np.sum(np.log(self._lam(state))[self._labels(state, n)]))

    def _extra_log_prior(self, state: ParamState, m: Optional[np.ndarray], data: Dataset, marginalize: bool) -> float:
        lp = float(gammaln(self.K))
        if not marginalize:
            lp += self.label_log_prior(state, len(data))
        return lp

    def log_posterior(self, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        lp = super().log_posterior(state, data, marginalize)
        if not marginalize:
            lp += self.label_log_prior(state, len(data))
        return lp

    def membership(self, m: np.ndarray, state: ParamState, data: Dataset, labeled: bool = False) -> np.ndarray:
        w = self.observation_weights(data)
        if labeled:
            n = len(data)
            onehot = np.zeros((self.K, n))
            onehot[self._labels(state, n), np.arange(n)] = 1.0
            return onehot * w
        return super().membership(m, state, data, labeled)

    def responsibilities(self, state: ParamState, data: Dataset) -> np.ndarray:
        """P(ζ_ℓ = k | y, latents), shape (K, N); columns sum to 1."""
        m = self.means_from_latents(state.z, len(data))
        comp = self.component_log_densities(m, state.phi, data) + self.mixing_log_weights(state)
        return softmax(comp, axis=0)

    def sample_prior(self, data: Dataset, rng: np.random.Generator) -> ParamState:
        state = super().sample_prior(data, rng)
        state.lam = rng.dirichlet(np.ones(self.K))
        state.zeta = rng.choice(self.K, size=len(data), p=state.lam)
        return state
