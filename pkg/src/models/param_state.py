"""One configuration of every latent parameter of a model."""

from dataclasses import dataclass, fields
from typing import Any, Dict, Optional

import numpy as np

from src.circular.angles import wrap_angle


@dataclass
class ParamState:
    """Latent parameters; unused fields stay None.

    Shapes by model (N locations, K components):
        iV / iVM: m (K,), phi (K,) with ρ = exp(φ), lam (K,).
        SvM:      z (1, 2, N) GP deviations from μ, m (1, N), phi (1, N), nu (1,).
        SvM-c:    z (K, 2, N), m (K, N), phi (K, N), nu (K,), lam (K,), zeta (N,).
        SvM-p:    z (K−1, N) logit deviations, m (K,), phi (K,), lam (K, N).

    `zeta` holds 0-based component labels. `r_latent` carries the radii of the
    centered polar parametrization when a sampler uses it.
    """

    m: Optional[np.ndarray] = None
    phi: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    nu: Optional[np.ndarray] = None
    lam: Optional[np.ndarray] = None
    zeta: Optional[np.ndarray] = None
    r_latent: Optional[np.ndarray] = None

    @property
    def rho(self) -> np.ndarray:
        return np.exp(self.phi)

    def copy(self) -> "ParamState":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        return ParamState(**{k: None if v is None else np.array(v) for k, v in values.items()})

    def to_dict(self) -> Dict[str, Any]:
        """Plain lists keyed by field name, for JSON records."""
        out: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                out[f.name] = np.asarray(value).tolist()
        return out

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ParamState":
        kwargs = {}
        for f in fields(cls):
            if d.get(f.name) is not None:
                dtype = int if f.name == "zeta" else float
                kwargs[f.name] = np.asarray(d[f.name], dtype=dtype)
        state = cls(**kwargs)
        if state.m is not None:
            state.m = wrap_angle(state.m)
        return state
