"""SvM-p: von Mises mixture whose mixing probabilities follow logistic GPs."""

import logging
from typing import Any, Dict, Tuple

import numpy as np
from scipy.special import logsumexp

from src.circular.angles import wrap_angle
from src.circular.von_mises import bessel_i_ratio, vm_log_pdf
from src.dataset import Dataset
from src.errors import DomainError
from src.gp.kernel import GpSpec
from src.models.base_model import BaseModel
from src.models.links import generalized_inverse_logit
from src.models.model_spec import GammaPrior, ModelKind, ModelSpec, VonMisesMeanPrior
from src.models.param_state import ParamState
from src.models.spatial import CENTERED, check_parametrization

logger = logging.getLogger(__name__)

LOG_TWO_PI = float(np.log(2.0 * np.pi))


class SpatialProbVonMises(BaseModel):
    """SvM-p: y_ℓ ~ Σ_k λ_kℓ vM(m_k, ρ_k) with λ_·ℓ = Ψ⁻¹(Z_1ℓ, …, Z_{K−1}ℓ).

    Each logit field Z_k ~ GP(μ, Σ) and is stored as the deviation z_k = Z_k − μ.
    m_k ~ Unif(0, 2π) and ρ_k ~ Gamma(1, 1) are fixed priors.
    """

    KIND = ModelKind.SVMP
    DEFAULT_K = 2
    DEFAULT_OMEGA = 0.1
    DEFAULT_SIGMA = 1.0
    DEFAULT_MEAN = 0.0

    def __init__(self):
        super().__init__()
        self.configure({})

    def configure(self, config: Dict[str, Any]):
        """Reads `K`, `omega`, `sigma`, `jitter` and the logit mean `mean`."""
        jitter = config.get("jitter")
        mean = config.get("mean", self.DEFAULT_MEAN)
        mean = np.asarray(mean, dtype=float) if isinstance(mean, (list, tuple, np.ndarray)) else float(mean)
        self.spec = ModelSpec(
            kind=self.KIND,
            K=int(config.get("K", self.DEFAULT_K)),
            gp=GpSpec(
                omega=float(config.get("omega", self.DEFAULT_OMEGA)),
                sigma=float(config.get("sigma", self.DEFAULT_SIGMA)),
                jitter=None if jitter is None else float(jitter),
                mean1=mean,
                mean2=0.0,
            ),
            conc_prior=GammaPrior(shape=1.0, rate=1.0),
            mean_prior=VonMisesMeanPrior(u=np.pi, c=0.0),
        )
        self._cov_cache = None
        logger.debug(f"{self} configured with K={self.spec.K}, sigma={self.spec.gp.sigma}")

    @property
    def K(self) -> int:
        return self.spec.K

    def _check(self, state: ParamState, n: int):
        if np.asarray(state.z).shape != (self.K - 1, n):
            raise DomainError(f"SvM-p logits have shape {np.asarray(state.z).shape}, expected {(self.K - 1, n)}")
        if np.asarray(state.m).reshape(-1).size != self.K or np.asarray(state.phi).reshape(-1).size != self.K:
            raise DomainError(f"SvM-p needs {self.K} means and concentrations")

    def mixing_probabilities(self, z: np.ndarray, n: int) -> np.ndarray:
        """λ at every location, shape (K, N)."""
        return generalized_inverse_logit(np.asarray(z, dtype=float) + self.spec.gp.mean_vector(1, n)[None, :])

    def complete(self, state: ParamState, data: Dataset) -> ParamState:
        state.lam = self.mixing_probabilities(state.z, len(data))
        return state

    def component_log_densities(self, state: ParamState, data: Dataset) -> np.ndarray:
        m = np.asarray(state.m, dtype=float).reshape(-1)
        rho = np.exp(np.asarray(state.phi, dtype=float).reshape(-1))
        return vm_log_pdf(data.directions[None, :], m[:, None], rho[:, None])

    def _joint(self, state: ParamState, data: Dataset) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = len(data)
        self._check(state, n)
        lam = self.mixing_probabilities(state.z, n)
        comp = self.component_log_densities(state, data)
        with np.errstate(divide="ignore"):
            joint = np.log(lam) + comp
        log_p = logsumexp(joint, axis=0)
        return lam, np.exp(joint - log_p), log_p

    def responsibilities(self, state: ParamState, data: Dataset) -> np.ndarray:
        return self._joint(state, data)[1]

    def log_likelihood(self, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        _, _, log_p = self._joint(state, data)
        return float(np.dot(self.observation_weights(data), log_p))

    def log_prior(self, state: ParamState, data: Dataset) -> float:
        cov = self.covariance(data)
        rho = np.exp(np.asarray(state.phi, dtype=float).reshape(-1))
        return float(np.sum(cov.log_density(state.z)) - self.K * LOG_TWO_PI - np.sum(rho))

    def sample_prior(self, data: Dataset, rng: np.random.Generator) -> ParamState:
        n = len(data)
        cov = self.covariance(data)
        z = rng.standard_normal((self.K - 1, n)) @ cov.chol.T
        m = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=self.K))
        rho = rng.gamma(1.0, 1.0, size=self.K)
        state = ParamState(z=z, m=m, phi=np.log(np.maximum(rho, 1e-8)))
        return self.complete(state, data)

    def grad_latent(self, state: ParamState, data: Dataset, parametrization: str = CENTERED) -> np.ndarray:
        """Gradient of the log posterior with respect to z (centered) or z̃ = L⁻¹z (non-centered).

        The data part is r_kℓ − λ_kℓ, i.e. λ_kℓ(f_kℓ − p_ℓ)/p_ℓ with f the
        component densities and p the mixture density.
        """
        check_parametrization(parametrization)
        lam, resp, _ = self._joint(state, data)
        data_grad = (resp[:-1] - lam[:-1]) * self.observation_weights(data)
        cov = self.covariance(data)
        if parametrization == CENTERED:
            return data_grad - cov.solve(np.asarray(state.z).T).T
        return data_grad @ cov.chol - cov.whiten(state.z)

    def grad_latent_two_component(self, state: ParamState, data: Dataset, parametrization: str = CENTERED) -> np.ndarray:
        """K = 2 form of `grad_latent`: λ₁(1 − λ₁)(f₁ − f₂)/p."""
        if self.K != 2:
            raise DomainError("The two-component gradient needs K = 2")
        check_parametrization(parametrization)
        n = len(data)
        lam = self.mixing_probabilities(state.z, n)
        f = np.exp(self.component_log_densities(state, data))
        p = lam[0] * f[0] + lam[1] * f[1]
        data_grad = (lam[0] * lam[1] * (f[0] - f[1]) / p * self.observation_weights(data))[None, :]
        cov = self.covariance(data)
        if parametrization == CENTERED:
            return data_grad - cov.solve(np.asarray(state.z).T).T
        return data_grad @ cov.chol - cov.whiten(state.z)

    # Unconstrained coordinates q = [z or z̃ (K−1)·N, m (K), log ρ (K)] for HMC.

    def dimension(self, data: Dataset) -> int:
        return (self.K - 1) * len(data) + 2 * self.K

    def pack(self, state: ParamState, data: Dataset, parametrization: str = CENTERED) -> np.ndarray:
        z = np.asarray(state.z, dtype=float)
        if check_parametrization(parametrization) != CENTERED:
            z = self.covariance(data).whiten(z)
        return np.concatenate([z.ravel(), np.asarray(state.m, dtype=float).ravel(), np.asarray(state.phi).ravel()])

    def unpack(self, q: np.ndarray, data: Dataset, parametrization: str = CENTERED) -> ParamState:
        n, K = len(data), self.K
        z = np.asarray(q[: (K - 1) * n]).reshape(K - 1, n)
        if parametrization != CENTERED:
            z = z @ self.covariance(data).chol.T
        off = (K - 1) * n
        state = ParamState(z=z, m=wrap_angle(np.array(q[off : off + K])), phi=np.array(q[off + K :]))
        return self.complete(state, data)

    def logp_and_grad(self, q: np.ndarray, data: Dataset, parametrization: str = CENTERED) -> Tuple[float, np.ndarray]:
        """Log posterior in unconstrained coordinates (log ρ Jacobian included) and its gradient."""
        check_parametrization(parametrization)
        n, K = len(data), self.K
        off = (K - 1) * n
        m = np.asarray(q[off : off + K])
        eta = np.asarray(q[off + K :])
        rho = np.exp(eta)
        state = self.unpack(q, data, parametrization)
        lam, resp, log_p = self._joint(state, data)
        w = self.observation_weights(data)
        cov = self.covariance(data)
        data_grad = (resp[:-1] - lam[:-1]) * w
        if parametrization == CENTERED:
            latent_lp = float(np.sum(cov.log_density(state.z)))
            g_z = data_grad - cov.solve(state.z.T).T
        else:
            z_tilde = np.asarray(q[:off]).reshape(K - 1, n)
            latent_lp = float(-0.5 * np.sum(z_tilde**2) - 0.5 * z_tilde.size * np.log(2.0 * np.pi))
            g_z = data_grad @ cov.chol - z_tilde
        rw = resp * w
        delta = data.directions[None, :] - m[:, None]
        g_m = rho * np.sum(rw * np.sin(delta), axis=1)
        g_eta = rho * (np.sum(rw * np.cos(delta), axis=1) - rw.sum(axis=1) * bessel_i_ratio(1, rho)) - rho + 1.0
        lp = float(np.dot(w, log_p)) + latent_lp - K * LOG_TWO_PI + float(np.sum(eta - rho))
        return lp, np.concatenate([g_z.ravel(), g_m, g_eta])
