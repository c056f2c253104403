"""Non-spatial models: a single von Mises (iV) and a von Mises mixture (iVM)."""

import logging
from typing import Any, Dict, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp, softmax
from scipy.stats import gamma as gamma_dist

from src.circular.angles import wrap_angle
from src.circular.von_mises import bessel_i_ratio, log_bessel_i0, vm_log_pdf
from src.dataset import Dataset
from src.errors import DomainError
from src.models.base_model import BaseModel
from src.models.links import dirichlet_jacobian_grad, generalized_inverse_logit, inverse_logit_to_logits
from src.models.model_spec import GammaPrior, ModelKind, ModelSpec, VonMisesMeanPrior
from src.models.param_state import ParamState

logger = logging.getLogger(__name__)

LOG_TWO_PI = float(np.log(2.0 * np.pi))


class IndependentVonMises(BaseModel):
    """Directions independent of location: y ~ Σ_k λ_k vM(m_k, ρ_k).

    K = 1 is the iV model. Priors are m_k ~ vM(u, c), ρ_k ~ Gamma(a, b) and
    λ ~ Dirichlet(1).
    """

    DEFAULT_MEAN_U = np.pi
    DEFAULT_MEAN_C = 0.0
    DEFAULT_GAMMA_SHAPE = 1.0
    DEFAULT_GAMMA_RATE = 0.1

    def __init__(self, kind: ModelKind = ModelKind.IV, K: int = 1):
        super().__init__()
        self.kind = ModelKind.parse(kind)
        self.default_K = 1 if self.kind == ModelKind.IV else max(int(K), 2)
        self.configure({})

    def configure(self, config: Dict[str, Any]):
        """Reads `K`, `mean_prior: {u, c}` and `conc_prior: {shape, rate}`."""
        mean_cfg = config.get("mean_prior", {}) or {}
        conc_cfg = config.get("conc_prior", {}) or {}
        self.spec = ModelSpec(
            kind=self.kind,
            K=int(config.get("K", self.default_K)),
            mean_prior=VonMisesMeanPrior(
                u=float(mean_cfg.get("u", self.DEFAULT_MEAN_U)), c=float(mean_cfg.get("c", self.DEFAULT_MEAN_C))
            ),
            conc_prior=GammaPrior(
                shape=float(conc_cfg.get("shape", self.DEFAULT_GAMMA_SHAPE)),
                rate=float(conc_cfg.get("rate", self.DEFAULT_GAMMA_RATE)),
            ),
        )
        logger.debug(f"{self} configured with K={self.spec.K}")

    @property
    def K(self) -> int:
        return self.spec.K

    def _weights(self, state: ParamState) -> np.ndarray:
        if self.K == 1:
            return np.ones(1)
        lam = np.asarray(state.lam, dtype=float).reshape(-1)
        if lam.size != self.K:
            raise DomainError(f"Expected {self.K} mixing weights, got {lam.size}")
        return lam

    def component_log_densities(self, state: ParamState, data: Dataset) -> np.ndarray:
        """log λ_k + log vM(y_ℓ; m_k, ρ_k), shape (K, N)."""
        m = np.asarray(state.m, dtype=float).reshape(-1)
        rho = np.exp(np.asarray(state.phi, dtype=float).reshape(-1))
        if m.size != self.K or rho.size != self.K:
            raise DomainError(f"State has {m.size} means and {rho.size} concentrations for K={self.K}")
        with np.errstate(divide="ignore"):
            log_w = np.log(self._weights(state))
        return log_w[:, None] + vm_log_pdf(data.directions[None, :], m[:, None], rho[:, None])

    def responsibilities(self, state: ParamState, data: Dataset) -> np.ndarray:
        return softmax(self.component_log_densities(state, data), axis=0)

    def log_likelihood(self, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        comp = self.component_log_densities(state, data)
        return float(np.dot(self.observation_weights(data), logsumexp(comp, axis=0)))

    def log_prior(self, state: ParamState, data: Dataset) -> float:
        m = np.asarray(state.m, dtype=float).reshape(-1)
        rho = np.exp(np.asarray(state.phi, dtype=float).reshape(-1))
        mp, cp = self.spec.mean_prior, self.spec.conc_prior
        lp = float(np.sum(mp.c * np.cos(m - mp.u)) - self.K * (LOG_TWO_PI + log_bessel_i0(mp.c)))
        if cp.rate > 0.0:
            lp += float(np.sum(gamma_dist.logpdf(rho, cp.shape, scale=1.0 / cp.rate)))
        else:
            lp += float(np.sum((cp.shape - 1.0) * np.log(rho)))
        if self.K > 1:
            lp += float(gammaln(self.K))
        return lp

    def sample_prior(self, data: Dataset, rng: np.random.Generator) -> ParamState:
        mp, cp = self.spec.mean_prior, self.spec.conc_prior
        m = wrap_angle(rng.vonmises(mp.u, mp.c, size=self.K))
        rate = cp.rate if cp.rate > 0.0 else 1.0
        rho = rng.gamma(cp.shape, 1.0 / rate, size=self.K)
        lam = rng.dirichlet(np.ones(self.K)) if self.K > 1 else np.ones(1)
        return ParamState(m=np.atleast_1d(m), phi=np.log(np.maximum(rho, 1e-8)), lam=lam)

    # Unconstrained coordinates q = [m (K), log ρ (K), logits (K−1)] for HMC.

    def dimension(self, data: Dataset) -> int:
        return 2 * self.K + (self.K - 1)

    def pack(self, state: ParamState) -> np.ndarray:
        parts = [np.asarray(state.m, dtype=float).reshape(-1), np.asarray(state.phi, dtype=float).reshape(-1)]
        if self.K > 1:
            parts.append(inverse_logit_to_logits(self._weights(state)))
        return np.concatenate(parts)

    def unpack(self, q: np.ndarray) -> ParamState:
        K = self.K
        lam = generalized_inverse_logit(q[2 * K :]) if K > 1 else np.ones(1)
        return ParamState(m=wrap_angle(np.array(q[:K])), phi=np.array(q[K : 2 * K]), lam=lam)

    def logp_and_grad(self, q: np.ndarray, data: Dataset) -> Tuple[float, np.ndarray]:
        """Log posterior in unconstrained coordinates (with Jacobians) and its gradient."""
        K = self.K
        state = self.unpack(q)
        m, rho, lam = np.asarray(q[:K]), np.exp(q[K : 2 * K]), state.lam
        mp, cp = self.spec.mean_prior, self.spec.conc_prior
        w = self.observation_weights(data)

        comp = self.component_log_densities(state, data)
        log_marg = logsumexp(comp, axis=0)
        r = np.exp(comp - log_marg) * w
        delta = data.directions[None, :] - m[:, None]

        lp = float(np.dot(w, log_marg)) + self.log_prior(state, data) + float(np.sum(q[K : 2 * K]))
        grad_m = rho * np.sum(r * np.sin(delta), axis=1) - mp.c * np.sin(m - mp.u)
        grad_eta = rho * (np.sum(r * np.cos(delta), axis=1) - r.sum(axis=1) * bessel_i_ratio(1, rho))
        grad_eta = grad_eta + cp.shape - cp.rate * rho
        parts = [grad_m, grad_eta]
        if K > 1:
            lp += float(np.sum(np.log(lam)))
            grad_a = r[:-1].sum(axis=1) - w.sum() * lam[:-1] + dirichlet_jacobian_grad(lam)
            parts.append(grad_a)
        return lp, np.concatenate(parts)
