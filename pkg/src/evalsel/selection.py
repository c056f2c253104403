"""Model selection by held-out posterior predictive probability."""

import logging
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.dataset import Dataset
from src.errors import DomainError
from src.evalsel.predictive import DEFAULT_BOOTSTRAP, DEFAULT_PRED_DRAWS, PpScore, log_posterior_predictive
from src.models.model_spec import ModelSpec
from src.samplers.chain import Chain

logger = logging.getLogger(__name__)

# Scores within this many standard errors of the best are reported as ties.
TIE_STANDARD_ERRORS = 2.0


@dataclass(frozen=True)
class Selection:
    """The best-scoring model and the models it cannot be told apart from."""

    model: str
    log_pp: float
    tied_with: List[str] = field(default_factory=list)

    @property
    def tie(self) -> bool:
        return bool(self.tied_with)


def _se(score: PpScore) -> float:
    return float(score.se) if np.isfinite(score.se) else 0.0


def select_model(scores: Sequence[PpScore], tie_se: float = TIE_STANDARD_ERRORS) -> Selection:
    """Picks the highest log posterior predictive probability.

    Another model ties with the winner when the gap is at most `tie_se` times
    the larger of their two bootstrap standard errors. Ties are reported, never
    broken.

    Raises:
        DomainError: If `scores` is empty.
    """
    if not scores:
        raise DomainError("select_model needs at least one score")
    best = max(scores, key=lambda s: s.log_pp)
    tied = [
        s.model
        for s in scores
        if s is not best and best.log_pp - s.log_pp <= tie_se * max(_se(best), _se(s))
    ]
    if tied:
        logger.warning(f"Model '{best.model}' scores best but ties with {tied} within {tie_se} standard errors")
    else:
        logger.info(f"Selected model '{best.model}' with log posterior predictive {best.log_pp:.3f}")
    return Selection(best.model, best.log_pp, tied)


def score_models(
    fits: Mapping[str, Tuple[ModelSpec, Sequence[Chain]]],
    train: Dataset,
    test: Dataset,
    n_pred_draws: int = DEFAULT_PRED_DRAWS,
    rng: Optional[np.random.Generator] = None,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    threads: int = 1,
    max_posterior_draws: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[PpScore]:
    """Scores every fitted model on the same test set.

    Args:
        fits: Model label → (spec, chains fitted on `train`).

    Returns:
        One PpScore per model, labelled with the mapping key, in mapping order.
    """
    rng = rng if rng is not None else np.random.default_rng(seed)
    scores = []
    for label, (spec, chains) in fits.items():
        score = log_posterior_predictive(
            spec, chains, train, test, n_pred_draws, rng, n_bootstrap, threads, max_posterior_draws, seed
        )
        scores.append(PpScore(label, score.log_pp, score.n_test, score.n_pred_draws, score.se, seed))
    return scores
