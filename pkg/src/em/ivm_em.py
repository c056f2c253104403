"""Regularized EM for the independent von Mises mixture (iVM), and iV as its K = 1 case."""

import logging
from typing import Optional

import numpy as np

from src.dataset import Dataset
from src.em.common import (
    EmConfig,
    EmResult,
    Responsibilities,
    best_of_restarts,
    check_data,
    concentration_update,
    initial_responsibilities,
    log_convergence,
    weighted_circular_mean,
)
from src.errors import DomainError
from src.models.factory import model_for_spec
from src.models.independent import IndependentVonMises
from src.models.model_spec import GammaPrior, ModelKind, ModelSpec, VonMisesMeanPrior
from src.models.param_state import ParamState

logger = logging.getLogger(__name__)


def ivm_em_spec(K: int) -> ModelSpec:
    """Uniform mean prior and the flat (improper) concentration prior a = 1, b = 0."""
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    kind = ModelKind.IV if K == 1 else ModelKind.IVM
    return ModelSpec(kind=kind, K=K, conc_prior=GammaPrior(1.0, 0.0), mean_prior=VonMisesMeanPrior(np.pi, 0.0))


def expected_log_posterior(model: IndependentVonMises, state: ParamState, resp: Responsibilities, data: Dataset) -> float:
    """Σ r (log λ + log vM) + log prior + entropy of r."""
    w = model.observation_weights(data)
    comp = model.component_log_densities(state, data)
    with np.errstate(invalid="ignore"):
        weighted = np.where(resp.r > 0.0, resp.r * comp, 0.0)
    return float(np.sum(weighted * w) + model.log_prior(state, data) + resp.entropy(w))


def _m_step(model: IndependentVonMises, state: ParamState, resp: Responsibilities, data: Dataset) -> ParamState:
    y, w = data.directions, model.observation_weights(data)
    rw = resp.r * w
    totals = rw.sum(axis=1)
    lam = totals / totals.sum()
    m = np.array([weighted_circular_mean(y, rw[k], fallback=state.m[k]) for k in range(model.K)])
    rho = np.array(
        [
            concentration_update(float(np.dot(rw[k], np.cos(y - m[k]))), float(totals[k]), current=float(state.rho[k]))
            for k in range(model.K)
        ]
    )
    return ParamState(m=m, phi=np.log(rho), lam=lam)


def _em_ivm_once(data: Dataset, spec: ModelSpec, config: EmConfig, rng: np.random.Generator) -> EmResult:
    model = model_for_spec(spec)
    resp, centres = initial_responsibilities(data.directions, spec.K, rng)
    state = ParamState(m=centres, phi=np.zeros(spec.K), lam=np.full(spec.K, 1.0 / spec.K))
    result = EmResult(spec=spec, state=state, resp=resp)
    for it in range(1, config.max_iters + 1):
        state = _m_step(model, state, resp, data)
        result.trace.append(expected_log_posterior(model, state, resp, data))
        result.marginal_trace.append(model.log_posterior(state, data))
        result.n_iters = it
        logger.debug(f"iVM EM iteration {it}: objective {result.trace[-1]:.6f}")
        resp = Responsibilities(model.responsibilities(state, data))
        if it > 1 and abs(result.trace[-1] - result.trace[-2]) < config.tol:
            result.converged = True
            break
    order = np.argsort(state.m, kind="stable")
    result.state = ParamState(m=state.m[order], phi=state.phi[order], lam=state.lam[order])
    result.resp = Responsibilities(resp.r[order])
    return result


def em_ivm(
    data: Dataset, K: int, config: Optional[EmConfig] = None, rng: Optional[np.random.Generator] = None, threads: int = 1
) -> EmResult:
    """Fits λ, m and ρ of a K-component von Mises mixture by EM.

    M-step updates are all closed form: λ_k = mean of r_k, m_k the r-weighted
    circular mean, and ρ_k solving I₁(ρ)/I₀(ρ) = Σ r cos(y − m_k) / Σ r.
    Components are returned sorted by mean direction. The ρ prior is flat, so
    the posterior can be improper when a component captures a single point;
    ρ is floored rather than left to diverge.

    Args:
        data: Observations; locations are ignored.
        K: Number of components (1 gives the iV fit).
        config: EM settings.
        rng: Seeds the k-means initialisation of every restart.
        threads: Worker threads for restarts.

    Raises:
        DomainError: On empty data or K < 1.
    """
    check_data(data)
    spec = ivm_em_spec(K)
    config = config or EmConfig()
    rng = rng if rng is not None else np.random.default_rng()
    result = best_of_restarts(lambda g: _em_ivm_once(data, spec, config, g), config, rng, threads)
    log_convergence(spec.name, result)
    return result
