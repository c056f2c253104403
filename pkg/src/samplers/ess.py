"""Elliptical slice sampling for latents with a zero-mean Gaussian prior."""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from src.errors import DomainError
from src.gp.covariance import CovMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EssConfig:
    max_shrink_iters: int = 64

    def __post_init__(self):
        if self.max_shrink_iters < 1:
            raise DomainError(f"max_shrink_iters must be >= 1, got {self.max_shrink_iters}")


@dataclass
class EssResult:
    """Outcome of one elliptical slice step.

    `exhausted` is True when the bracket shrink limit was hit; `f` is then the
    unchanged input state.
    """

    f: np.ndarray
    log_lik: float
    n_evals: int
    exhausted: bool = False


def _safe_loglik(loglik: Callable[[np.ndarray], float], f: np.ndarray) -> float:
    try:
        value = float(loglik(f))
    except DomainError:
        # Proposals on the arctan* origin have prior probability zero.
        return -np.inf
    return value if np.isfinite(value) or value == -np.inf else -np.inf


def ess_step(
    f: np.ndarray,
    prior_chol: Union[CovMatrix, np.ndarray],
    loglik: Callable[[np.ndarray], float],
    rng: np.random.Generator,
    config: Optional[EssConfig] = None,
    current_loglik: Optional[float] = None,
) -> EssResult:
    """One elliptical slice sampling transition.

    The prior is N(0, L Lᵀ) along the last axis of `f`, applied independently to
    any leading axes, so a (2, N) latent pair has covariance I₂ ⊗ Σ.

    Args:
        f: Current latent values (zero-mean deviations).
        prior_chol: CovMatrix of the prior or its lower Cholesky factor L.
        loglik: Log-likelihood of a latent array.
        rng: Seeded numpy generator.
        config: Shrink limit.
        current_loglik: loglik(f) if already known.

    Returns:
        EssResult with the new state and its log-likelihood.
    """
    config = config or EssConfig()
    chol = prior_chol.chol if isinstance(prior_chol, CovMatrix) else np.asarray(prior_chol)
    f = np.asarray(f, dtype=float)
    cur = _safe_loglik(loglik, f) if current_loglik is None else float(current_loglik)
    nu = rng.standard_normal(f.shape) @ chol.T
    log_y = cur + np.log(rng.uniform())
    theta = rng.uniform(0.0, 2.0 * np.pi)
    lo, hi = theta - 2.0 * np.pi, theta
    for i in range(config.max_shrink_iters):
        proposal = f * np.cos(theta) + nu * np.sin(theta)
        value = _safe_loglik(loglik, proposal)
        if value > log_y:
            return EssResult(proposal, value, i + 1)
        if theta < 0.0:
            lo = theta
        else:
            hi = theta
        theta = rng.uniform(lo, hi)
    logger.warning(f"Elliptical slice sampler hit the shrink limit ({config.max_shrink_iters}); keeping current state")
    return EssResult(f, cur, config.max_shrink_iters, exhausted=True)
