"""Held-out log posterior predictive probability of fitted models."""

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp
from tqdm import tqdm

from src.circular.angles import arctan_star
from src.circular.von_mises import vm_log_pdf, vm_mixture_log_density
from src.dataset import Dataset
from src.errors import DomainError
from src.gp.conditional import ConditionalSampler
from src.models.factory import model_for_spec
from src.models.links import generalized_inverse_logit
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.samplers.chain import Chain

logger = logging.getLogger(__name__)

DEFAULT_PRED_DRAWS = 100
DEFAULT_BOOTSTRAP = 200


@dataclass(frozen=True)
class PpScore:
    """Log posterior predictive probability of a test set under one fitted model.

    `se` is the bootstrap standard error over test points (NaN if not computed).
    """

    model: str
    log_pp: float
    n_test: int
    n_pred_draws: int
    se: float = float("nan")
    seed: Optional[int] = None

    def __post_init__(self):
        if not np.isfinite(self.log_pp):
            raise DomainError(f"Score of model '{self.model}' is not finite: {self.log_pp}")

    def to_row(self) -> Dict[str, Any]:
        return asdict(self)


def posterior_draws(chains: Union[Chain, Sequence[Chain]], max_draws: Optional[int] = None) -> List[ParamState]:
    """Pooled draws of one or more chains, evenly thinned to at most `max_draws`."""
    chains = [chains] if isinstance(chains, Chain) else list(chains)
    draws = [d for c in chains for d in c.draws]
    if not draws:
        raise DomainError("Posterior predictive scoring needs at least one posterior draw")
    if max_draws is not None and len(draws) > max_draws:
        keep = np.linspace(0, len(draws) - 1, max_draws).round().astype(int)
        draws = [draws[i] for i in keep]
    return draws


def split_dataset(data: Dataset, n_test: int, rng: np.random.Generator) -> Tuple[Dataset, Dataset]:
    """Withholds `n_test` random observations; returns (train, test)."""
    if not 1 <= n_test < len(data):
        raise DomainError(f"n_test must lie in [1, {len(data) - 1}], got {n_test}")
    order = rng.permutation(len(data))
    test_idx, train_idx = np.sort(order[:n_test]), np.sort(order[n_test:])
    return data.subset(train_idx), data.subset(test_idx)


class _Extender:
    """Draws test-location parameters given one posterior draw and evaluates log p(y*ℓ | θ*)."""

    def __init__(self, spec: ModelSpec, train: Dataset, test: Dataset, n_pred_draws: int):
        self.spec = spec
        self.kind = spec.kind
        self.test = test
        self.J = n_pred_draws
        if self.kind.spatial:
            if not spec.gp.has_constant_means:
                raise DomainError("Predictive extension needs constant GP means")
            model = model_for_spec(spec)
            self.sampler = ConditionalSampler(train.locations, test.locations, spec.gp, model.covariance(train))

    def _gp_means(self, n: int) -> np.ndarray:
        out = np.empty((self.spec.K, 2, n))
        for k in range(self.spec.K):
            gp = self.spec.component_gp(k)
            out[k, 0], out[k, 1] = gp.mean_vector(1, n), gp.mean_vector(2, n)
        return out

    def log_densities(self, draw: ParamState, rng: np.random.Generator) -> np.ndarray:
        """log p(y*ℓ | θ*_j) for every predictive draw j, shape (J, n_test)."""
        y = self.test.directions
        n = len(self.test)
        if self.kind in (ModelKind.IV, ModelKind.IVM):
            lam = np.ones(1) if self.spec.K == 1 else np.asarray(draw.lam, dtype=float)
            lp = vm_mixture_log_density(y, np.asarray(draw.m).reshape(-1), np.exp(np.asarray(draw.phi).reshape(-1)), lam)
            return np.broadcast_to(np.atleast_1d(lp), (self.J, n))
        if self.kind == ModelKind.SVMP:
            z = np.broadcast_to(np.asarray(draw.z, dtype=float), (self.J,) + np.shape(draw.z))
            z_star = self.sampler.sample(z, rng) + self.spec.gp.mean_vector(1, n)
            lam = generalized_inverse_logit(np.moveaxis(z_star, 1, 0))
            m = np.asarray(draw.m, dtype=float).reshape(-1)
            comp = vm_log_pdf(y[None, None, :], m[:, None, None], np.exp(np.asarray(draw.phi).reshape(-1))[:, None, None])
            with np.errstate(divide="ignore"):
                return logsumexp(np.log(lam) + comp, axis=0)
        z = np.broadcast_to(np.asarray(draw.z, dtype=float), (self.J,) + np.shape(draw.z))
        full = self.sampler.sample(z, rng) + self._gp_means(n)
        m_star = arctan_star(full[:, :, 0], full[:, :, 1])
        prior = self.spec.conc_prior
        nu = np.asarray(draw.nu, dtype=float).reshape(-1)
        phi_star = nu[None, :, None] + prior.varsigma * rng.standard_normal(m_star.shape)
        comp = vm_log_pdf(y[None, None, :], m_star, np.exp(phi_star))
        if self.kind == ModelKind.SVM:
            return comp[:, 0]
        with np.errstate(divide="ignore"):
            log_lam = np.log(np.asarray(draw.lam, dtype=float).reshape(-1))
        return logsumexp(comp + log_lam[None, :, None], axis=1)


def _score(log_dens: np.ndarray, counts: Optional[np.ndarray] = None) -> float:
    """Mean over predictive draws of the log of the mean over posterior draws.

    `log_dens` has shape (S, J, n_test); `counts` re-weights test points for the bootstrap.
    """
    joint = log_dens.sum(axis=2) if counts is None else log_dens @ counts
    S = joint.shape[0]
    return float(np.mean(logsumexp(joint, axis=0) - np.log(S)))


def bootstrap_se(log_dens: np.ndarray, n_boot: int, rng: np.random.Generator) -> float:
    """Standard deviation of the score over test sets resampled with replacement."""
    n_test = log_dens.shape[2]
    if n_boot < 2 or n_test < 2:
        return float("nan")
    counts = rng.multinomial(n_test, np.full(n_test, 1.0 / n_test), size=n_boot).astype(float)
    values = [_score(log_dens, c) for c in counts]
    return float(np.std(values, ddof=1))


def predictive_log_densities(
    spec: ModelSpec,
    chains: Union[Chain, Sequence[Chain]],
    train: Dataset,
    test: Dataset,
    n_pred_draws: int = DEFAULT_PRED_DRAWS,
    rng: Optional[np.random.Generator] = None,
    threads: int = 1,
    max_posterior_draws: Optional[int] = None,
    progress: bool = True,
) -> np.ndarray:
    """log p(y*ℓ | θ*_{s,j}) for posterior draw s and predictive draw j, shape (S, J, n_test).

    Each posterior draw gets its own spawned stream, so the result does not
    depend on `threads`.
    """
    if n_pred_draws < 1:
        raise DomainError(f"n_pred_draws must be >= 1, got {n_pred_draws}")
    if len(test) == 0:
        raise DomainError("Posterior predictive scoring needs at least one test point")
    draws = posterior_draws(chains, max_posterior_draws)
    rng = rng if rng is not None else np.random.default_rng()
    extender = _Extender(spec, train, test, n_pred_draws)
    seeds = np.random.SeedSequence(int(rng.integers(2**63))).spawn(len(draws))

    def one(i: int) -> np.ndarray:
        return extender.log_densities(draws[i], np.random.default_rng(seeds[i]))

    show = progress and sys.stderr.isatty()
    bar = dict(total=len(draws), desc=f"Scoring {spec.name}", unit="draw", leave=False, disable=not show)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(tqdm(pool.map(one, range(len(draws))), **bar))
    else:
        rows = [one(i) for i in tqdm(range(len(draws)), **bar)]
    return np.stack(rows)


def log_posterior_predictive(
    spec: ModelSpec,
    chains: Union[Chain, Sequence[Chain]],
    train: Dataset,
    test: Dataset,
    n_pred_draws: int = DEFAULT_PRED_DRAWS,
    rng: Optional[np.random.Generator] = None,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    threads: int = 1,
    max_posterior_draws: Optional[int] = None,
    seed: Optional[int] = None,
) -> PpScore:
    """Scores a fitted model on withheld observations.

    For every posterior draw θ_s, J predictive draws θ*_{s,j} extend the latents
    to the test locations: GP values through the conditional GP given θ_s,
    log-concentrations from N(ν, ς²), and everything else unchanged. The score
    is (1/J) Σ_j log((1/S) Σ_s p(y* | θ*_{s,j})), with p(y* | θ*) the product
    over test points and SvM-c labels marginalised through λ.

    Args:
        spec: Fitted model specification.
        chains: Chains fitted on `train`.
        train: Training observations.
        test: Withheld observations.
        n_pred_draws: J.
        rng: Source of the predictive and bootstrap streams.
        n_bootstrap: Resamples for the standard error; 0 skips it.
        threads: Worker threads over posterior draws.
        max_posterior_draws: Thins the pooled draws to at most this many.
        seed: Recorded in the score.

    Raises:
        DomainError: On an empty chain or test set.
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    log_dens = predictive_log_densities(spec, chains, train, test, n_pred_draws, rng, threads, max_posterior_draws)
    score = _score(log_dens)
    se = bootstrap_se(log_dens, n_bootstrap, rng) if n_bootstrap else float("nan")
    logger.info(f"Model '{spec.name}': log posterior predictive {score:.3f} (se {se:.3f}) on {len(test)} test points")
    return PpScore(spec.name, score, len(test), n_pred_draws, se, seed)
