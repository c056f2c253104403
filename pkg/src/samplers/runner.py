"""Sampler factory, the per-model fit functions and multi-chain runs."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from src.dataset import Dataset
from src.errors import ChainAbortedError, DomainError
from src.models.factory import model_for_spec
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.samplers.base_sampler import BaseSampler
from src.samplers.chain import Chain, chain_diagnostics, max_r_hat
from src.samplers.independent_sampler import IndependentSampler
from src.samplers.svm_sampler import SpatialSampler
from src.samplers.svmp_sampler import SvmpSampler

logger = logging.getLogger(__name__)

FitFunction = Callable[..., Chain]

# Split-R̂ above this marks a run as not converged.
R_HAT_WARNING = 1.2


def create_sampler(kind: Union[str, ModelKind], config: Optional[Dict[str, Any]] = None) -> Optional[BaseSampler]:
    """Creates the sampler that fits a model kind and applies its config section.

    Returns:
        A configured sampler, or None for an unknown kind or invalid settings.
    """
    try:
        kind = ModelKind.parse(kind)
    except ValueError:
        logger.error(f"Unknown model type for sampler: '{kind}'")
        return None
    if kind in (ModelKind.IV, ModelKind.IVM):
        sampler: BaseSampler = IndependentSampler()
    elif kind == ModelKind.SVMP:
        sampler = SvmpSampler()
    else:
        sampler = SpatialSampler()
    try:
        sampler.configure(config or {})
    except ValueError as e:
        logger.error(f"Invalid sampler settings for '{kind.value}': {e}", exc_info=True)
        return None
    return sampler


def _fit(
    expected: Sequence[ModelKind],
    data: Dataset,
    spec: ModelSpec,
    settings: Optional[Dict[str, Any]],
    rng: np.random.Generator,
    init: Optional[ParamState] = None,
    seed: int = 0,
    label: str = "chain",
) -> Chain:
    if spec.kind not in expected:
        raise DomainError(f"Cannot fit a {spec.kind.value} spec with this scheme")
    sampler = create_sampler(spec.kind, settings)
    if sampler is None:
        raise DomainError(f"Could not configure a sampler for {spec.kind.value}")
    return sampler.sample(model_for_spec(spec), data, rng, init=init, seed=seed, label=label)


def fit_svm(data: Dataset, spec: ModelSpec, settings: Optional[Dict[str, Any]], rng: np.random.Generator, **kwargs) -> Chain:
    """Blocked Gibbs for SvM: ESS on (Z₁ − μ₁, Z₂ − μ₂), then HMC on (φ, ν)."""
    return _fit((ModelKind.SVM,), data, spec, settings, rng, **kwargs)


def fit_svmc(data: Dataset, spec: ModelSpec, settings: Optional[Dict[str, Any]], rng: np.random.Generator, **kwargs) -> Chain:
    """Blocked Gibbs for SvM-c: ζ, λ, per-component ESS, then HMC on (φ_k, ν_k)."""
    return _fit((ModelKind.SVMC,), data, spec, settings, rng, **kwargs)


def fit_svmp(data: Dataset, spec: ModelSpec, settings: Optional[Dict[str, Any]], rng: np.random.Generator, **kwargs) -> Chain:
    """Joint HMC for SvM-p over the logit latents, means and log-concentrations."""
    return _fit((ModelKind.SVMP,), data, spec, settings, rng, **kwargs)


def fit_independent(
    data: Dataset, spec: ModelSpec, settings: Optional[Dict[str, Any]], rng: np.random.Generator, **kwargs
) -> Chain:
    """Joint HMC for iV and iVM."""
    return _fit((ModelKind.IV, ModelKind.IVM), data, spec, settings, rng, **kwargs)


FIT_FUNCTIONS: Dict[ModelKind, FitFunction] = {
    ModelKind.IV: fit_independent,
    ModelKind.IVM: fit_independent,
    ModelKind.SVM: fit_svm,
    ModelKind.SVMC: fit_svmc,
    ModelKind.SVMP: fit_svmp,
}


def chain_seeds(seed: int, n_chains: int) -> List[int]:
    """Independent per-chain seeds spawned from one root seed."""
    children = np.random.SeedSequence(seed).spawn(n_chains)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]


def run_chains(
    fit_fn: Optional[FitFunction],
    data: Dataset,
    spec: ModelSpec,
    settings: Optional[Dict[str, Any]],
    seed: int,
    n_chains: int = 4,
    threads: int = 1,
    inits: Optional[Sequence[Optional[ParamState]]] = None,
) -> List[Chain]:
    """Runs independent chains, then computes split-R̂ and ESS across them.

    Chain i uses its own generator seeded from the i-th spawned seed, so results
    do not depend on `threads`.

    Args:
        fit_fn: One of the fit functions; None picks the one for `spec.kind`.
        data: Observations.
        spec: Model specification.
        settings: Sampler config section.
        seed: Root seed.
        n_chains: Number of chains.
        threads: Worker threads; 1 runs the chains sequentially.
        inits: Optional starting state per chain; an empty sequence means none.

    Returns:
        The chains, each carrying the joint diagnostics.

    Raises:
        ChainAbortedError: The first aborted chain, raised after every chain has
            run, with `chain_index` set and the finished chains in `completed`.
    """
    if n_chains < 1:
        raise DomainError(f"n_chains must be >= 1, got {n_chains}")
    fit_fn = fit_fn or FIT_FUNCTIONS[spec.kind]
    seeds = chain_seeds(seed, n_chains)
    inits = list(inits) if inits else [None] * n_chains
    if len(inits) < n_chains:
        inits = inits + [inits[-1]] * (n_chains - len(inits))

    def run_one(i: int) -> Union[Chain, ChainAbortedError]:
        rng = np.random.default_rng(seeds[i])
        try:
            return fit_fn(data, spec, settings, rng, init=inits[i], seed=seeds[i], label=f"chain {i}")
        except ChainAbortedError as e:
            e.chain_index = i
            return e

    if threads > 1 and n_chains > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, range(n_chains)))
    else:
        results = [run_one(i) for i in range(n_chains)]

    aborted = [r for r in results if isinstance(r, ChainAbortedError)]
    if aborted:
        first = aborted[0]
        first.completed = {i: r for i, r in enumerate(results) if isinstance(r, Chain)}
        logger.error(f"{len(aborted)} of {n_chains} chains aborted; first was chain {first.chain_index}")
        raise first
    chains: List[Chain] = results

    diagnostics = chain_diagnostics(chains)
    for chain in chains:
        chain.diagnostics = diagnostics
    worst = max_r_hat(diagnostics)
    if worst is not None and worst > R_HAT_WARNING:
        logger.warning(f"Chains have not converged: max split-R-hat {worst:.3f} > {R_HAT_WARNING}")
    else:
        logger.info(f"{n_chains} chains finished; max split-R-hat {worst}")
    return chains
