"""Spatial von Mises models whose component means follow projected GPs (SvM, and the core of SvM-c)."""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.special import logsumexp, softmax

from src.circular.angles import arctan_star, at_origin
from src.circular.von_mises import bessel_i_ratio, vm_log_pdf
from src.dataset import Dataset
from src.errors import DomainError
from src.gp.covariance import CovMatrix
from src.gp.kernel import GpSpec
from src.models.base_model import BaseModel, hierarchical_grads, hierarchical_log_prior
from src.models.model_spec import HierarchicalPrior, ModelKind, ModelSpec
from src.models.param_state import ParamState

logger = logging.getLogger(__name__)

CENTERED = "centered"
NONCENTERED = "noncentered"
PARAMETRIZATIONS = (CENTERED, NONCENTERED)


def check_parametrization(parametrization: str) -> str:
    if parametrization not in PARAMETRIZATIONS:
        raise DomainError(f"Unknown parametrization '{parametrization}', expected one of {PARAMETRIZATIONS}")
    return parametrization


class SpatialVonMises(BaseModel):
    """SvM: y_ℓ ~ vM(m_ℓ, e^{φ_ℓ}) with m_ℓ = arctan*(Z₁ℓ, Z₂ℓ), Z_j ~ GP(μ_j, Σ).

    Latents are stored as zero-mean deviations z = Z − μ with shape (K, 2, N);
    K = 1 here. φ_ℓ ~ N(ν, ς²) and ν ~ N(0, τ²).
    """

    KIND = ModelKind.SVM
    DEFAULT_K = 1
    DEFAULT_OMEGA = 0.1
    DEFAULT_SIGMA = 0.5
    DEFAULT_MEAN = (-1.0, 0.0)
    DEFAULT_VARSIGMA = 0.05
    DEFAULT_TAU = 5.0

    def __init__(self):
        super().__init__()
        self.configure({})

    def configure(self, config: Dict[str, Any]):
        """Reads `omega`, `sigma`, `jitter`, `mean: [μ₁, μ₂]`, `varsigma` and `tau`."""
        mean = config.get("mean", self.DEFAULT_MEAN)
        self.spec = ModelSpec(
            kind=self.KIND,
            K=int(config.get("K", self.DEFAULT_K)),
            gp=self._gp_from_config(config, mean),
            conc_prior=HierarchicalPrior(
                varsigma=float(config.get("varsigma", self.DEFAULT_VARSIGMA)),
                tau=float(config.get("tau", self.DEFAULT_TAU)),
            ),
        )
        self._cov_cache = None
        logger.debug(f"{self} configured: omega={self.spec.gp.omega}, sigma={self.spec.gp.sigma}")

    def _gp_from_config(self, config: Dict[str, Any], mean) -> GpSpec:
        jitter = config.get("jitter")
        return GpSpec(
            omega=float(config.get("omega", self.DEFAULT_OMEGA)),
            sigma=float(config.get("sigma", self.DEFAULT_SIGMA)),
            jitter=None if jitter is None else float(jitter),
            mean1=_as_mean(mean[0]),
            mean2=_as_mean(mean[1]),
        )

    @property
    def K(self) -> int:
        return self.spec.K

    # GP-linked means

    def gp_means(self, n: int) -> np.ndarray:
        """μ of every component and coordinate at n locations, shape (K, 2, n)."""
        out = np.empty((self.K, 2, n))
        for k in range(self.K):
            gp = self.spec.component_gp(k)
            out[k, 0] = gp.mean_vector(1, n)
            out[k, 1] = gp.mean_vector(2, n)
        return out

    def full_latents(self, z: np.ndarray, n: int) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.K, 2, n):
            raise DomainError(f"Latent array has shape {z.shape}, expected {(self.K, 2, n)}")
        return z + self.gp_means(n)

    def means_from_latents(self, z: np.ndarray, n: int) -> np.ndarray:
        full = self.full_latents(z, n)
        return arctan_star(full[:, 0], full[:, 1])

    def complete(self, state: ParamState, data: Dataset) -> ParamState:
        state.m = self.means_from_latents(state.z, len(data))
        return state

    def _check_shapes(self, state: ParamState, n: int):
        phi = np.asarray(state.phi)
        if phi.shape != (self.K, n):
            raise DomainError(f"phi has shape {phi.shape}, expected {(self.K, n)}")
        if np.asarray(state.nu).shape != (self.K,):
            raise DomainError(f"nu has shape {np.asarray(state.nu).shape}, expected {(self.K,)}")

    # Densities

    def component_log_densities(self, m: np.ndarray, phi: np.ndarray, data: Dataset) -> np.ndarray:
        """log vM(y_ℓ; m_kℓ, e^{φ_kℓ}), shape (K, N)."""
        return vm_log_pdf(data.directions[None, :], m, np.exp(phi))

    def mixing_log_weights(self, state: ParamState) -> np.ndarray:
        return np.zeros((self.K, 1))

    def _log_likelihood_from_means(self, m, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        comp = self.component_log_densities(m, state.phi, data)
        w = self.observation_weights(data)
        return float(np.dot(w, logsumexp(comp + self.mixing_log_weights(state), axis=0)))

    def log_likelihood(self, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
        n = len(data)
        self._check_shapes(state, n)
        m = self.means_from_latents(state.z, n)
        return self._log_likelihood_from_means(m, state, data, marginalize)

    def latent_log_prior(self, z: np.ndarray, cov: CovMatrix) -> float:
        return float(np.sum(cov.log_density(z)))

    def log_prior(self, state: ParamState, data: Dataset) -> float:
        cov = self.covariance(data)
        lp = self.latent_log_prior(state.z, cov) + hierarchical_log_prior(state.phi, state.nu, self.spec.conc_prior)
        return lp + self._extra_log_prior(state, None, data, True)

    def sample_prior(self, data: Dataset, rng: np.random.Generator) -> ParamState:
        n = len(data)
        cov = self.covariance(data)
        prior = self.spec.conc_prior
        for _ in range(100):
            z = rng.standard_normal((self.K, 2, n)) @ cov.chol.T
            full = self.full_latents(z, n)
            if not np.any(at_origin(full[:, 0], full[:, 1])):
                break
        nu = rng.normal(0.0, prior.tau, size=self.K)
        phi = nu[:, None] + prior.varsigma * rng.standard_normal((self.K, n))
        state = ParamState(z=z, phi=phi, nu=nu)
        return self.complete(state, data)

    # Membership weights used by every gradient

    def membership(self, m: np.ndarray, state: ParamState, data: Dataset, labeled: bool = False) -> np.ndarray:
        """Weight of observation ℓ in component k (1 for a single component), times any observation weight."""
        w = self.observation_weights(data)
        if self.K == 1:
            return np.broadcast_to(w, (1, len(data))).copy()
        comp = self.component_log_densities(m, state.phi, data) + self.mixing_log_weights(state)
        return softmax(comp, axis=0) * w

    def _data_terms(self, m: np.ndarray, state: ParamState, data: Dataset, weights: np.ndarray):
        rho = np.exp(state.phi)
        delta = data.directions[None, :] - m
        g_mean = weights * rho * np.sin(delta)
        g_phi = weights * rho * (np.cos(delta) - bessel_i_ratio(1, rho))
        return g_mean, g_phi

    def grad_latent(
        self, state: ParamState, data: Dataset, parametrization: str = CENTERED, labeled: bool = False
    ) -> Dict[str, np.ndarray]:
        """Gradient of the log posterior in Cartesian latent coordinates.

        Returns a dict with `z` (centered) or `z_tilde` (non-centered), plus `phi` and `nu`.
        Non-centered coordinates are z̃ = L⁻¹ z with the Cholesky factor L of Σ.
        """
        check_parametrization(parametrization)
        n = len(data)
        self._check_shapes(state, n)
        cov = self.covariance(data)
        full = self.full_latents(state.z, n)
        m = arctan_star(full[:, 0], full[:, 1])
        weights = self.membership(m, state, data, labeled)
        g_mean, g_phi = self._data_terms(m, state, data, weights)
        r2 = full[:, 0] ** 2 + full[:, 1] ** 2
        data_grad = np.stack([-g_mean * full[:, 1] / r2, g_mean * full[:, 0] / r2], axis=1)
        prior_phi, prior_nu = hierarchical_grads(state.phi, state.nu, self.spec.conc_prior)
        out = {"phi": g_phi + prior_phi, "nu": prior_nu}
        if parametrization == CENTERED:
            prior = -cov.solve(state.z.reshape(-1, n).T).T.reshape(state.z.shape)
            out["z"] = data_grad + prior
        else:
            z_tilde = cov.whiten(state.z)
            out["z_tilde"] = data_grad @ cov.chol - z_tilde
        return out

    def component_log_likelihood(
        self, k: int, z_k: np.ndarray, state: ParamState, data: Dataset, mask: Optional[np.ndarray] = None
    ) -> float:
        """Σ_ℓ log vM(y_ℓ; m_kℓ, ρ_kℓ) for component k with latents `z_k` of shape (2, N).

        Only observations selected by `mask` contribute; latents are still defined everywhere.
        """
        n = len(data)
        gp = self.spec.component_gp(k)
        m = arctan_star(z_k[0] + gp.mean_vector(1, n), z_k[1] + gp.mean_vector(2, n))
        ll = vm_log_pdf(data.directions, m, np.exp(state.phi[k])) * self.observation_weights(data)
        if mask is not None:
            ll = ll[mask]
        return float(np.sum(ll))

    def concentration_logp_and_grad(
        self, q: np.ndarray, state: ParamState, data: Dataset, labeled: bool = False
    ) -> Tuple[float, np.ndarray]:
        """Log posterior of the (φ, ν) block given the means in `state`, and its gradient.

        `q` is φ flattened over (K, N) followed by ν.
        """
        K, n = self.K, len(data)
        trial = state.copy()
        trial.phi = np.asarray(q[: K * n]).reshape(K, n)
        trial.nu = np.asarray(q[K * n :])
        prior = self.spec.conc_prior
        m = np.asarray(state.m, dtype=float)
        lp = self._log_likelihood_from_means(m, trial, data, marginalize=not labeled)
        lp += hierarchical_log_prior(trial.phi, trial.nu, prior)
        weights = self.membership(m, trial, data, labeled)
        _, g_phi = self._data_terms(m, trial, data, weights)
        p_phi, p_nu = hierarchical_grads(trial.phi, trial.nu, prior)
        return float(lp), np.concatenate([(g_phi + p_phi).ravel(), p_nu])

    # Polar parametrizations

    def polar_log_posterior(
        self,
        angle: np.ndarray,
        radius: np.ndarray,
        state: ParamState,
        data: Dataset,
        parametrization: str = CENTERED,
        marginalize: bool = True,
    ) -> float:
        """Log posterior as a function of polar latent coordinates.

        Centered: Z = r(cos m, sin m), so `angle` is the mean m itself.
        Non-centered: z̃ = r̃(cos m̃, sin m̃) and z = L z̃. Both include the
        polar Jacobian Σ log r. `phi`, `nu` and any mixture fields come from `state`.
        """
        check_parametrization(parametrization)
        if np.any(np.asarray(radius) <= 0.0):
            raise DomainError("Polar radii must be > 0")
        n = len(data)
        cov = self.covariance(data)
        cart = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
        if parametrization == CENTERED:
            z = cart - self.gp_means(n)
            latent_lp = self.latent_log_prior(z, cov)
        else:
            z = cart @ cov.chol.T
            latent_lp = float(-0.5 * np.sum(cart**2) - cart.size * 0.5 * np.log(2.0 * np.pi))
        trial = state.copy()
        trial.z = z
        m = self.means_from_latents(z, n)
        lp = self._log_likelihood_from_means(m, trial, data, marginalize)
        lp += latent_lp + hierarchical_log_prior(trial.phi, trial.nu, self.spec.conc_prior)
        lp += self._extra_log_prior(trial, m, data, marginalize)
        return float(lp + np.sum(np.log(radius)))

    def _extra_log_prior(self, state: ParamState, m: np.ndarray, data: Dataset, marginalize: bool) -> float:
        return 0.0

    def polar_grad(
        self,
        angle: np.ndarray,
        radius: np.ndarray,
        state: ParamState,
        data: Dataset,
        parametrization: str = CENTERED,
        labeled: bool = False,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Gradients of `polar_log_posterior` with respect to (angle, radius), each shaped (K, N).

        Centered, with a = Σ⁻¹(r cos m − μ₁) and b = Σ⁻¹(r sin m − μ₂):
            ∂/∂m = ρ sin(y − m) + r(a sin m − b cos m),  ∂/∂r = 1/r − a cos m − b sin m.
        Non-centered, with u₁ = Lᵀ(−g Z₂/R²), u₂ = Lᵀ(g Z₁/R²) and g = ρ sin(y − m):
            ∂/∂m̃ = r̃(u₂ cos m̃ − u₁ sin m̃),  ∂/∂r̃ = u₁ cos m̃ + u₂ sin m̃ + 1/r̃ − r̃.
        Data terms are weighted by component membership for mixtures.
        """
        check_parametrization(parametrization)
        n = len(data)
        cov = self.covariance(data)
        cos_a, sin_a = np.cos(angle), np.sin(angle)
        cart = np.stack([radius * cos_a, radius * sin_a], axis=1)
        if parametrization == CENTERED:
            z = cart - self.gp_means(n)
            m = np.asarray(angle, dtype=float)
        else:
            z = cart @ cov.chol.T
            m = self.means_from_latents(z, n)
        trial = state.copy()
        trial.z = z
        weights = self.membership(m, trial, data, labeled)
        g, _ = self._data_terms(m, trial, data, weights)
        if parametrization == CENTERED:
            a = cov.solve(z[:, 0].T).T
            b = cov.solve(z[:, 1].T).T
            g_angle = g + radius * (a * sin_a - b * cos_a)
            g_radius = 1.0 / radius - a * cos_a - b * sin_a
            return g_angle, g_radius
        full = z + self.gp_means(n)
        r2 = full[:, 0] ** 2 + full[:, 1] ** 2
        u1 = (-g * full[:, 1] / r2) @ cov.chol
        u2 = (g * full[:, 0] / r2) @ cov.chol
        g_angle = radius * (u2 * cos_a - u1 * sin_a)
        g_radius = u1 * cos_a + u2 * sin_a + 1.0 / radius - radius
        return g_angle, g_radius

    def polar_coordinates(self, state: ParamState, data: Dataset, parametrization: str) -> Tuple[np.ndarray, np.ndarray]:
        """(angle, radius) of the state in the requested polar parametrization."""
        check_parametrization(parametrization)
        n = len(data)
        if parametrization == CENTERED:
            if state.r_latent is None:
                raise DomainError("Centered polar coordinates need r_latent radii in the state")
            m = state.m if state.m is not None else self.means_from_latents(state.z, n)
            return np.asarray(m, dtype=float), np.asarray(state.r_latent, dtype=float)
        z_tilde = self.covariance(data).whiten(state.z)
        return arctan_star(z_tilde[:, 0], z_tilde[:, 1]), np.hypot(z_tilde[:, 0], z_tilde[:, 1])


def _as_mean(value):
    if isinstance(value, (list, tuple, np.ndarray)):
        return np.asarray(value, dtype=float)
    return float(value)


def with_radii(state: ParamState, model: SpatialVonMises, data: Dataset) -> ParamState:
    """Copy of `state` carrying the centered radii |Z| needed by the centered polar parametrization."""
    out = state.copy()
    full = model.full_latents(out.z, len(data))
    out.r_latent = np.hypot(full[:, 0], full[:, 1])
    out.m = arctan_star(full[:, 0], full[:, 1])
    return out


