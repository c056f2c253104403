"""Model identity and hyperparameters."""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from src.errors import DomainError
from src.gp.kernel import GpSpec


class ModelKind(str, Enum):
    IV = "iv"
    IVM = "ivm"
    SVM = "svm"
    SVMC = "svmc"
    SVMP = "svmp"

    @classmethod
    def parse(cls, name: Union[str, "ModelKind"]) -> "ModelKind":
        if isinstance(name, ModelKind):
            return name
        key = str(name).strip().lower().replace("-", "")
        for kind in cls:
            if kind.value == key:
                return kind
        raise DomainError(f"Unknown model kind '{name}'")

    @property
    def spatial(self) -> bool:
        return self in (ModelKind.SVM, ModelKind.SVMC, ModelKind.SVMP)


@dataclass(frozen=True)
class HierarchicalPrior:
    """φ ~ N(ν, ς²) per location and ν ~ N(0, τ²); ς and τ are fixed."""

    varsigma: float = 0.05
    tau: float = 5.0

    def __post_init__(self):
        if not (self.varsigma > 0.0 and self.tau > 0.0):
            raise DomainError(f"Hierarchical prior needs varsigma, tau > 0, got {self.varsigma}, {self.tau}")


@dataclass(frozen=True)
class GammaPrior:
    """ρ ~ Gamma(shape a, rate b). b = 0 with a = 1 is the flat prior used by iVM EM."""

    shape: float = 1.0
    rate: float = 0.1

    def __post_init__(self):
        if not (self.shape > 0.0 and self.rate >= 0.0):
            raise DomainError(f"Gamma prior needs shape > 0 and rate >= 0, got {self.shape}, {self.rate}")


@dataclass(frozen=True)
class VonMisesMeanPrior:
    """m ~ vM(u, c); c = 0 is the uniform prior."""

    u: float = np.pi
    c: float = 0.0

    def __post_init__(self):
        if not self.c >= 0.0:
            raise DomainError(f"Mean prior concentration must be >= 0, got {self.c}")


ConcPrior = Union[HierarchicalPrior, GammaPrior]


@dataclass(frozen=True)
class ModelSpec:
    """Which model is fitted, with its component count and priors.

    Attributes:
        kind: Model family.
        K: Number of mixture components.
        gp: Kernel and GP means; None for the independent models. For SvM-p the
            logit GPs all use `gp.mean1` as their mean.
        conc_prior: Hierarchical prior (SvM, SvM-c) or Gamma prior (iV, iVM, SvM-p).
        mean_prior: vM prior on the component means (iV, iVM, SvM-p).
        component_means: Per-component (μ₁, μ₂) for SvM-c.
    """

    kind: ModelKind
    K: int = 1
    gp: Optional[GpSpec] = None
    conc_prior: ConcPrior = field(default_factory=GammaPrior)
    mean_prior: VonMisesMeanPrior = field(default_factory=VonMisesMeanPrior)
    component_means: Optional[Tuple[Tuple[Any, Any], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        if self.kind in (ModelKind.IV, ModelKind.SVM) and self.K != 1:
            raise DomainError(f"{self.kind.value} has exactly one component, got K={self.K}")
        if self.kind in (ModelKind.IVM, ModelKind.SVMC, ModelKind.SVMP) and self.K < 2:
            raise DomainError(f"{self.kind.value} needs K >= 2, got K={self.K}")
        if self.kind.spatial and self.gp is None:
            raise DomainError(f"{self.kind.value} needs a GP specification")
        if self.kind in (ModelKind.SVM, ModelKind.SVMC) and not isinstance(self.conc_prior, HierarchicalPrior):
            raise DomainError(f"{self.kind.value} uses the hierarchical concentration prior")
        if self.kind == ModelKind.SVMC:
            means = self.component_means
            if means is None:
                means = tuple((self.gp.mean1, self.gp.mean2) for _ in range(self.K))
            if len(means) != self.K:
                raise DomainError(f"SvM-c needs {self.K} component means, got {len(means)}")
            object.__setattr__(self, "component_means", tuple(tuple(pair) for pair in means))

    def component_gp(self, k: int) -> GpSpec:
        """GP of component k: shared kernel, component-specific means for SvM-c."""
        if self.kind == ModelKind.SVMC:
            mu1, mu2 = self.component_means[k]
            return self.gp.with_means(mu1, mu2)
        return self.gp

    @property
    def name(self) -> str:
        return self.kind.value

    def to_dict(self) -> Dict[str, Any]:
        def plain(value):
            if isinstance(value, np.ndarray):
                return value.tolist()
            if isinstance(value, (tuple, list)):
                return [plain(v) for v in value]
            return value

        out: Dict[str, Any] = {"kind": self.kind.value, "K": self.K}
        if self.gp is not None:
            out["gp"] = {
                "omega": self.gp.omega,
                "sigma": self.gp.sigma,
                "jitter": self.gp.jitter,
                "mean1": plain(self.gp.mean1),
                "mean2": plain(self.gp.mean2),
            }
        if isinstance(self.conc_prior, HierarchicalPrior):
            out["conc_prior"] = {"type": "hierarchical", "varsigma": self.conc_prior.varsigma, "tau": self.conc_prior.tau}
        else:
            out["conc_prior"] = {"type": "gamma", "shape": self.conc_prior.shape, "rate": self.conc_prior.rate}
        out["mean_prior"] = {"u": self.mean_prior.u, "c": self.mean_prior.c}
        if self.component_means is not None:
            out["component_means"] = plain(self.component_means)
        return out

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ModelSpec":
        gp = GpSpec(**d["gp"]) if d.get("gp") else None
        cp = dict(d.get("conc_prior", {}))
        kind = cp.pop("type", "gamma")
        conc_prior = HierarchicalPrior(**cp) if kind == "hierarchical" else GammaPrior(**cp)
        means = d.get("component_means")
        return cls(
            kind=ModelKind.parse(d["kind"]),
            K=int(d.get("K", 1)),
            gp=gp,
            conc_prior=conc_prior,
            mean_prior=VonMisesMeanPrior(**d.get("mean_prior", {})),
            component_means=tuple(tuple(p) for p in means) if means is not None else None,
        )

    def spec_hash(self) -> str:
        """Short stable hash identifying the specification in chain headers."""
        payload = json.dumps(self.to_dict(), sort_keys=True, default=float)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
