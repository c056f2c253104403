"""Regularized EM for SvM-c on the non-centered (whitened) GP coordinates."""

import logging
from typing import Optional

import numpy as np

from src.circular.angles import arctan_star, arctan_star_grad
from src.circular.von_mises import bessel_i_ratio, log_bessel_i0
from src.dataset import Dataset
from src.em.common import (
    EmConfig,
    EmResult,
    Responsibilities,
    align_clusters,
    best_of_restarts,
    check_data,
    concentration_update,
    gradient_ascent,
    initial_responsibilities,
    log_convergence,
)
from src.errors import DomainError
from src.models.base_model import hierarchical_log_prior
from src.models.factory import model_for_spec
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.models.spatial_cluster import SpatialClusterVonMises

logger = logging.getLogger(__name__)

# GP means with a smaller norm than this count as the origin.
ZERO_MEAN = 1e-12


class _SvmcEm:
    """State of one SvM-c EM run: z̃ (K, 2, N), φ (K, N), ν (K,), λ (K,)."""

    def __init__(self, model: SpatialClusterVonMises, data: Dataset, config: EmConfig):
        self.model = model
        self.data = data
        self.config = config
        self.n = len(data)
        self.K = model.K
        self.cov = model.covariance(data)
        self.mu = model.gp_means(self.n)
        self.w = model.observation_weights(data)
        self.prior = model.spec.conc_prior

    def initialize(self, rng: np.random.Generator):
        y = self.data.directions
        resp, centres = initial_responsibilities(y, self.K, rng)
        mean_dirs = self.mu.mean(axis=2)
        has_direction = np.hypot(mean_dirs[:, 0], mean_dirs[:, 1]) > ZERO_MEAN
        if np.all(has_direction):
            perm = align_clusters(centres, arctan_star(mean_dirs[:, 0], mean_dirs[:, 1]))
            resp, centres = Responsibilities(resp.r[perm]), centres[perm]
        self.z_tilde = np.zeros((self.K, 2, self.n))
        for k in np.flatnonzero(~has_direction):
            # A zero GP mean leaves arctan* undefined at z = 0; start along the cluster direction.
            sigma = self.model.spec.gp.sigma
            start = np.stack([np.full(self.n, sigma * np.cos(centres[k])), np.full(self.n, sigma * np.sin(centres[k]))])
            self.z_tilde[k] = self.cov.whiten(start)
        rw = resp.r * self.w
        phi0 = np.array(
            [
                np.log(concentration_update(float(np.dot(rw[k], np.cos(y - centres[k]))), float(rw[k].sum())))
                for k in range(self.K)
            ]
        )
        self.phi = np.repeat(phi0[:, None], self.n, axis=1)
        self.nu = phi0.copy()
        self.lam = rw.sum(axis=1) / rw.sum()
        return resp

    def latents(self, z_tilde: np.ndarray) -> np.ndarray:
        return z_tilde @ self.cov.chol.T

    def state(self) -> ParamState:
        state = ParamState(z=self.latents(self.z_tilde), phi=self.phi.copy(), nu=self.nu.copy(), lam=self.lam.copy())
        return self.model.complete(state, self.data)

    def objective(self, resp: Responsibilities) -> float:
        """Expected conditional log posterior of the current parameters plus the entropy of r."""
        state = self.state()
        comp = self.model.component_log_densities(state.m, state.phi, self.data)
        with np.errstate(divide="ignore", invalid="ignore"):
            expected = np.where(resp.r > 0.0, resp.r * (np.log(self.lam)[:, None] + comp), 0.0)
        latent = -0.5 * np.sum(self.z_tilde**2) - 0.5 * self.z_tilde.size * np.log(2.0 * np.pi)
        hier = hierarchical_log_prior(self.phi, self.nu, self.prior)
        return float(np.sum(expected * self.w) + latent + hier + resp.entropy(self.w))

    # M-step blocks

    def update_weights(self, resp: Responsibilities):
        rw = resp.r * self.w
        self.lam = rw.sum(axis=1) / rw.sum()

    def _block_terms(self, k: int, row: int, x: np.ndarray):
        zt = self.z_tilde[k].copy()
        zt[row] = x
        full = self.latents(zt) + self.mu[k]
        return zt, full

    def update_latents(self, k: int, resp: Responsibilities):
        y = self.data.directions
        weight = resp.r[k] * self.w * np.exp(self.phi[k])
        for row in (0, 1):

            def value(x, row=row):
                zt, full = self._block_terms(k, row, x)
                try:
                    m = arctan_star(full[0], full[1])
                except DomainError:
                    return -np.inf
                return float(np.dot(weight, np.cos(y - m)) - 0.5 * np.sum(zt**2))

            def grad(x, row=row):
                zt, full = self._block_terms(k, row, x)
                m = arctan_star(full[0], full[1])
                dm = arctan_star_grad(full[0], full[1])[row]
                return (weight * np.sin(y - m) * dm) @ self.cov.chol - x

            result = gradient_ascent(value, grad, self.z_tilde[k, row], self.config)
            self.z_tilde[k, row] = result.x

    def update_concentrations(self, resp: Responsibilities):
        y = self.data.directions
        m = self.state().m
        rw = resp.r * self.w
        s2 = self.prior.varsigma**2
        nu = self.nu[:, None]

        def value(phi):
            rho = np.exp(phi)
            return rw * (rho * np.cos(y - m) - log_bessel_i0(rho)) - 0.5 * (phi - nu) ** 2 / s2

        def grad(phi):
            rho = np.exp(phi)
            return rw * rho * (np.cos(y - m) - bessel_i_ratio(1, rho)) - (phi - nu) / s2

        self.phi = gradient_ascent(value, grad, self.phi, self.config, scale=s2, elementwise=True).x

    def update_means(self):
        self.nu = nu_update(self.phi, self.prior.varsigma, self.prior.tau)

    def responsibilities(self) -> Responsibilities:
        return Responsibilities(self.model.responsibilities(self.state(), self.data))


def nu_update(phi: np.ndarray, varsigma: float, tau: float) -> np.ndarray:
    """ν_k = (Σ_ℓ φ_kℓ/ς²) / (N/ς² + 1/τ²), the maximiser for fixed φ."""
    phi = np.atleast_2d(phi)
    s2, t2 = varsigma**2, tau**2
    return (phi.sum(axis=1) / s2) / (phi.shape[1] / s2 + 1.0 / t2)


def _em_svmc_once(data: Dataset, spec: ModelSpec, config: EmConfig, rng: np.random.Generator) -> EmResult:
    run = _SvmcEm(model_for_spec(spec), data, config)
    resp = run.initialize(rng)
    result = EmResult(spec=spec, state=run.state(), resp=resp)
    for it in range(1, config.max_iters + 1):
        run.update_weights(resp)
        for k in range(run.K):
            run.update_latents(k, resp)
        run.update_concentrations(resp)
        run.update_means()
        result.trace.append(run.objective(resp))
        result.marginal_trace.append(run.model.log_posterior(run.state(), data))
        result.n_iters = it
        logger.debug(f"SvM-c EM iteration {it}: objective {result.trace[-1]:.6f}")
        resp = run.responsibilities()
        if it > 1 and abs(result.trace[-1] - result.trace[-2]) < config.tol:
            result.converged = True
            break
    state = run.state()
    state.zeta = resp.labels()
    result.state, result.resp = state, resp
    return result


def em_svmc(
    data: Dataset,
    spec: ModelSpec,
    config: Optional[EmConfig] = None,
    rng: Optional[np.random.Generator] = None,
    threads: int = 1,
) -> EmResult:
    """Fits λ, the whitened GP latents z̃, φ and ν of SvM-c by regularized EM.

    Each M-step sets λ_k to the mean responsibility, runs backtracking
    gradient ascent on z̃_k one coordinate field at a time and on φ, then sets
    ν_k in closed form. The result's `state` holds z = L z̃.

    Raises:
        DomainError: On empty data or a spec that is not SvM-c.
        NumericError: If a gradient is not finite where the ascent starts.
    """
    if spec.kind != ModelKind.SVMC:
        raise DomainError(f"em_svmc needs an SvM-c spec, got {spec.name}")
    check_data(data)
    config = config or EmConfig()
    rng = rng if rng is not None else np.random.default_rng()
    result = best_of_restarts(lambda g: _em_svmc_once(data, spec, config, g), config, rng, threads)
    log_convergence(spec.name, result)
    return result
