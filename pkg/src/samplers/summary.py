"""Posterior summaries: circular means and 95% credible intervals averaged across locations."""

import logging
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from src.circular.angles import wrap_angle
from src.circular.summary import circular_summary
from src.errors import DomainError
from src.models.model_spec import ModelKind
from src.samplers.chain import Chain

logger = logging.getLogger(__name__)

CI_LEVEL = 0.95


def _pooled(chains: Sequence[Chain], name: str) -> np.ndarray:
    return np.concatenate([c.stack(name) for c in chains], axis=0)


def circular_interval(draws: np.ndarray, level: float = CI_LEVEL) -> Tuple[float, float, float]:
    """Circular mean of draws and an equal-tailed interval around it.

    The interval ends are the mean plus quantiles of the signed deviations in
    (−π, π], so they may fall outside [0, 2π) when the interval covers 0.
    """
    centre = circular_summary(draws).mean.value
    dev = np.angle(np.exp(1j * (np.asarray(draws) - centre)))
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(dev, [tail, 1.0 - tail])
    return centre, centre + float(lo), centre + float(hi)


def _linear_interval(draws: np.ndarray, level: float = CI_LEVEL) -> Tuple[float, float, float]:
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(draws, [tail, 1.0 - tail])
    return float(np.mean(draws)), float(lo), float(hi)


def _location_averaged_circular(draws: np.ndarray) -> Tuple[float, float, float]:
    """draws of shape (S, N): per-location circular summaries, then averaged across locations."""
    per_loc = [circular_interval(draws[:, l]) for l in range(draws.shape[1])]
    centres = np.array([p[0] for p in per_loc])
    centre = circular_summary(centres).mean.value
    lo = float(np.mean([p[1] - p[0] for p in per_loc]))
    hi = float(np.mean([p[2] - p[0] for p in per_loc]))
    return centre, centre + lo, centre + hi


def _location_averaged_linear(draws: np.ndarray) -> Tuple[float, float, float]:
    per_loc = np.array([_linear_interval(draws[:, l]) for l in range(draws.shape[1])])
    return tuple(float(v) for v in per_loc.mean(axis=0))


def component_order(chains: Sequence[Chain]) -> np.ndarray:
    """Component indices sorted by the pooled circular mean of their m draws."""
    spec = chains[0].spec
    m = _pooled(chains, "m")
    means = [circular_summary(m[:, k].ravel()).mean.value for k in range(spec.K)]
    return np.argsort(means, kind="stable")


def _entry(name: str, values: Tuple[float, float, float]) -> Dict[str, Any]:
    return {"name": name, "mean": values[0], "ci_low": values[1], "ci_high": values[2]}


def summarize_chain(chains: Sequence[Chain]) -> Dict[str, Any]:
    """Summarises pooled chains of one model.

    Spatial fields (m and ρ for SvM/SvM-c, λ for SvM-p) are reported as location
    averages, written with a `_bar` suffix. Components are relabelled by
    increasing circular mean; draws themselves are never relabelled.

    Returns:
        Dict with `model`, `params` (name, mean, ci_low, ci_high), `diagnostics`,
        `stats` per chain and `component_order`.
    """
    chains = [c for c in chains if len(c)]
    if not chains:
        raise DomainError("Cannot summarise empty chains")
    spec = chains[0].spec
    order = component_order(chains)
    params: List[Dict[str, Any]] = []
    m = _pooled(chains, "m")
    rho = np.exp(_pooled(chains, "phi"))
    for new_k, k in enumerate(order):
        if spec.kind in (ModelKind.SVM, ModelKind.SVMC):
            params.append(_entry(f"m_bar[{new_k}]", _location_averaged_circular(m[:, k, :])))
            params.append(_entry(f"rho_bar[{new_k}]", _location_averaged_linear(rho[:, k, :])))
            params.append(_entry(f"nu[{new_k}]", _linear_interval(_pooled(chains, "nu")[:, k])))
        else:
            params.append(_entry(f"m[{new_k}]", circular_interval(m[:, k])))
            params.append(_entry(f"rho[{new_k}]", _linear_interval(rho[:, k])))
        if spec.K > 1:
            lam = _pooled(chains, "lam")
            if spec.kind == ModelKind.SVMP:
                params.append(_entry(f"lambda_bar[{new_k}]", _location_averaged_linear(lam[:, k, :])))
            else:
                params.append(_entry(f"lambda[{new_k}]", _linear_interval(lam[:, k])))
    for p in params:
        if p["name"].startswith("m"):
            p["mean"] = float(wrap_angle(p["mean"]))
    logger.info(f"Summarised {sum(len(c) for c in chains)} draws of {spec.name}")
    return {
        "model": spec.name,
        "params": params,
        "diagnostics": chains[0].diagnostics,
        "stats": [c.stats for c in chains],
        "component_order": [int(k) for k in order],
    }
