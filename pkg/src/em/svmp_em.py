"""Regularized EM for SvM-p on the whitened logit fields."""

import logging
from typing import Optional

import numpy as np
from scipy.special import log_softmax

from src.dataset import Dataset
from src.em.common import (
    EmConfig,
    EmResult,
    Responsibilities,
    best_of_restarts,
    check_data,
    concentration_update,
    gradient_ascent,
    initial_responsibilities,
    log_convergence,
    weighted_circular_mean,
)
from src.errors import DomainError
from src.models.factory import model_for_spec
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.models.spatial_prob import SpatialProbVonMises

logger = logging.getLogger(__name__)

# Gamma(1, 1) prior on ρ: its log density is −ρ.
RHO_PRIOR_RATE = 1.0


def padded_logits(z: np.ndarray, mean: np.ndarray) -> np.ndarray:
    """Full logits [Z₁ … Z_{K−1}, 0] from the deviations z = Z − μ, shape (K, N)."""
    z = np.asarray(z, dtype=float)
    return np.concatenate([z + mean[None, :], np.zeros((1, z.shape[1]))], axis=0)


def logit_field_gradient(
    r_k: np.ndarray, lam_k: np.ndarray, chol: np.ndarray, z_tilde_k: np.ndarray, weights: Optional[np.ndarray] = None
) -> np.ndarray:
    """Σ_ℓ′ (r_kℓ′ − λ_kℓ′) L_ℓ′ℓ − z̃_kℓ, the gradient of the EM objective in z̃_k."""
    diff = np.asarray(r_k, dtype=float) - np.asarray(lam_k, dtype=float)
    if weights is not None:
        diff = diff * weights
    return diff @ chol - z_tilde_k


def permute_components(state: ParamState, perm: np.ndarray, mean: np.ndarray) -> ParamState:
    """Relabels components so that new component k is old component perm[k].

    The logits are re-expressed relative to the new last component:
    Z'_k = Z_perm[k] − Z_perm[K].
    """
    full = padded_logits(state.z, mean)[perm]
    full = full - full[-1]
    return ParamState(z=full[:-1] - mean[None, :], m=state.m[perm], phi=state.phi[perm])


class _SvmpEm:
    """State of one SvM-p EM run: z̃ (K−1, N), m (K,), ρ (K,)."""

    def __init__(self, model: SpatialProbVonMises, data: Dataset, config: EmConfig):
        self.model = model
        self.data = data
        self.config = config
        self.n = len(data)
        self.K = model.K
        self.cov = model.covariance(data)
        self.mean = model.spec.gp.mean_vector(1, self.n)
        self.w = model.observation_weights(data)

    def initialize(self, rng: np.random.Generator) -> Responsibilities:
        y = self.data.directions
        resp, centres = initial_responsibilities(y, self.K, rng)
        self.z_tilde = np.zeros((self.K - 1, self.n))
        self.m = centres.copy()
        rw = resp.r * self.w
        self.rho = np.array(
            [concentration_update(float(np.dot(rw[k], np.cos(y - self.m[k]))), float(rw[k].sum())) for k in range(self.K)]
        )
        return resp

    def latents(self, z_tilde: np.ndarray) -> np.ndarray:
        return z_tilde @ self.cov.chol.T

    def state(self) -> ParamState:
        state = ParamState(z=self.latents(self.z_tilde), m=self.m.copy(), phi=np.log(self.rho))
        return self.model.complete(state, self.data)

    def log_mixing(self, z_tilde: np.ndarray) -> np.ndarray:
        return log_softmax(padded_logits(self.latents(z_tilde), self.mean), axis=0)

    def objective(self, resp: Responsibilities) -> float:
        """Expected conditional log posterior of the current parameters plus the entropy of r."""
        comp = self.model.component_log_densities(self.state(), self.data)
        expected = np.sum(resp.r * (self.log_mixing(self.z_tilde) + comp) * self.w)
        latent = -0.5 * np.sum(self.z_tilde**2) - 0.5 * self.z_tilde.size * np.log(2.0 * np.pi)
        prior = -self.K * np.log(2.0 * np.pi) - RHO_PRIOR_RATE * np.sum(self.rho)
        return float(expected + latent + prior + resp.entropy(self.w))

    def update_logits(self, k: int, resp: Responsibilities):
        rw = resp.r * self.w

        def with_row(x):
            zt = self.z_tilde.copy()
            zt[k] = x
            return zt

        def value(x):
            zt = with_row(x)
            return float(np.sum(rw * self.log_mixing(zt)) - 0.5 * np.sum(zt**2))

        def grad(x):
            lam = np.exp(self.log_mixing(with_row(x)))
            return logit_field_gradient(resp.r[k], lam[k], self.cov.chol, x, self.w)

        self.z_tilde[k] = gradient_ascent(value, grad, self.z_tilde[k], self.config).x

    def update_components(self, resp: Responsibilities):
        y = self.data.directions
        rw = resp.r * self.w
        for k in range(self.K):
            self.m[k] = weighted_circular_mean(y, rw[k], fallback=self.m[k])
            self.rho[k] = concentration_update(
                float(np.dot(rw[k], np.cos(y - self.m[k]))), float(rw[k].sum()), RHO_PRIOR_RATE, self.rho[k]
            )

    def responsibilities(self) -> Responsibilities:
        return Responsibilities(self.model.responsibilities(self.state(), self.data))


def _em_svmp_once(data: Dataset, spec: ModelSpec, config: EmConfig, rng: np.random.Generator) -> EmResult:
    run = _SvmpEm(model_for_spec(spec), data, config)
    resp = run.initialize(rng)
    result = EmResult(spec=spec, state=run.state(), resp=resp)
    for it in range(1, config.max_iters + 1):
        for k in range(run.K - 1):
            run.update_logits(k, resp)
        run.update_components(resp)
        result.trace.append(run.objective(resp))
        result.marginal_trace.append(run.model.log_posterior(run.state(), data))
        result.n_iters = it
        logger.debug(f"SvM-p EM iteration {it}: objective {result.trace[-1]:.6f}")
        resp = run.responsibilities()
        if it > 1 and abs(result.trace[-1] - result.trace[-2]) < config.tol:
            result.converged = True
            break
    perm = np.argsort(run.m, kind="stable")
    state = run.model.complete(permute_components(run.state(), perm, run.mean), data)
    result.state, result.resp = state, Responsibilities(resp.r[perm])
    return result


def em_svmp(
    data: Dataset,
    spec: ModelSpec,
    config: Optional[EmConfig] = None,
    rng: Optional[np.random.Generator] = None,
    threads: int = 1,
) -> EmResult:
    """Fits the whitened logit fields z̃, means m and concentrations ρ of SvM-p by regularized EM.

    The M-step runs backtracking gradient ascent on each z̃_k with gradient
    Σ_ℓ′ (r − λ) L − z̃, sets m_k to the r-weighted circular mean and ρ_k to the
    root of Σ r (cos(y − m_k) − I₁/I₀(ρ)) = 1. Components are returned sorted
    by mean, with the logits re-expressed for the new order.

    Raises:
        DomainError: On empty data or a spec that is not SvM-p.
        NumericError: If a gradient is not finite where the ascent starts.
    """
    if spec.kind != ModelKind.SVMP:
        raise DomainError(f"em_svmp needs an SvM-p spec, got {spec.name}")
    check_data(data)
    config = config or EmConfig()
    rng = rng if rng is not None else np.random.default_rng()
    result = best_of_restarts(lambda g: _em_svmp_once(data, spec, config, g), config, rng, threads)
    log_convergence(spec.name, result)
    return result
