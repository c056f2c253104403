"""Posterior draws of one chain, scalar functionals and convergence diagnostics."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import arviz as az
import numpy as np

from src.circular.summary import circular_summary
from src.errors import DomainError
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState

logger = logging.getLogger(__name__)

# Fewer kept draws than this per chain make split-R̂ meaningless.
MIN_DRAWS_FOR_DIAGNOSTICS = 4


@dataclass
class Chain:
    """Ordered posterior draws with the settings and statistics of the run that produced them.

    `stats` holds acceptance rates, divergence and ESS-exhaustion counts.
    `diagnostics` is filled after all chains of a run are joined.
    """

    spec: ModelSpec
    draws: List[ParamState]
    seed: int
    n_warmup: int
    n_keep: int
    thin: int = 1
    stats: Dict[str, float] = field(default_factory=dict)
    diagnostics: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.thin < 1:
            raise DomainError(f"thin must be >= 1, got {self.thin}")
        if len(self.draws) != self.n_keep:
            raise DomainError(f"Chain holds {len(self.draws)} draws but n_keep is {self.n_keep}")

    def __len__(self) -> int:
        return len(self.draws)

    def stack(self, name: str) -> np.ndarray:
        """Array of one ParamState field across draws, draws on the first axis."""
        values = [getattr(d, name) for d in self.draws]
        if any(v is None for v in values):
            raise DomainError(f"Draws do not all carry '{name}'")
        return np.stack([np.asarray(v) for v in values])

    def header(self) -> Dict[str, Any]:
        return {
            "record": "header",
            "model": self.spec.name,
            "spec": self.spec.to_dict(),
            "spec_hash": self.spec.spec_hash(),
            "seed": self.seed,
            "n_warmup": self.n_warmup,
            "n_keep": self.n_keep,
            "thin": self.thin,
            "stats": self.stats,
        }


def scalar_functionals(spec: ModelSpec, draw: ParamState) -> Dict[str, float]:
    """Scalar summaries of one draw used for convergence checks.

    Location-averaged ρ̄ per component, the first mixing weight (location-averaged
    for SvM-p) and the cosine and sine of each component's circular mean.
    """
    out: Dict[str, float] = {}
    rho = np.exp(np.asarray(draw.phi, dtype=float))
    rho = rho.reshape(spec.K, -1)
    m = np.asarray(draw.m, dtype=float).reshape(spec.K, -1)
    for k in range(spec.K):
        out[f"rho_bar[{k}]"] = float(rho[k].mean())
        s = circular_summary(m[k])
        out[f"m_cos[{k}]"] = float(s.resultant_length * np.cos(s.mean.value))
        out[f"m_sin[{k}]"] = float(s.resultant_length * np.sin(s.mean.value))
    if spec.K > 1 and draw.lam is not None:
        lam = np.asarray(draw.lam, dtype=float)
        out["lambda[0]"] = float(lam[0].mean()) if spec.kind == ModelKind.SVMP else float(lam[0])
    return out


def chain_diagnostics(chains: Sequence[Chain]) -> Dict[str, Dict[str, float]]:
    """Rank-normalised split-R̂ and bulk ESS of every scalar functional across chains.

    Returns:
        Mapping functional name → {"r_hat", "ess_bulk"}; NaN when chains are too short.
    """
    if not chains:
        raise DomainError("chain_diagnostics needs at least one chain")
    spec = chains[0].spec
    n = min(len(c) for c in chains)
    series: Dict[str, np.ndarray] = {}
    for ci, chain in enumerate(chains):
        for di, draw in enumerate(chain.draws[:n]):
            for name, value in scalar_functionals(spec, draw).items():
                series.setdefault(name, np.full((len(chains), n), np.nan))[ci, di] = value
    out: Dict[str, Dict[str, float]] = {}
    if n < MIN_DRAWS_FOR_DIAGNOSTICS:
        logger.warning(f"Only {n} draws per chain; convergence diagnostics skipped")
        return {name: {"r_hat": float("nan"), "ess_bulk": float("nan")} for name in series}
    idata = az.from_dict(posterior={_safe(name): arr for name, arr in series.items()})
    rhat = az.rhat(idata)
    ess = az.ess(idata, method="bulk")
    for name in series:
        out[name] = {"r_hat": float(rhat[_safe(name)]), "ess_bulk": float(ess[_safe(name)])}
    return out


def max_r_hat(diagnostics: Dict[str, Dict[str, float]]) -> Optional[float]:
    values = [d["r_hat"] for d in diagnostics.values() if np.isfinite(d["r_hat"])]
    return max(values) if values else None


def _safe(name: str) -> str:
    return name.replace("[", "_").replace("]", "")
