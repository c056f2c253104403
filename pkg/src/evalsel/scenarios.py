"""Simulated datasets for the six generating scenarios used in model comparison."""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np

from src.dataset import Dataset
from src.errors import DomainError
from src.gp.covariance import build_cov
from src.gp.kernel import GpSpec
from src.gp.projected import projected_gp_sample
from src.models.links import generalized_inverse_logit
from src.models.model_spec import GammaPrior, HierarchicalPrior, ModelKind, ModelSpec
from src.models.param_state import ParamState

logger = logging.getLogger(__name__)

HALF_PI, THREE_HALF_PI = 0.5 * np.pi, 1.5 * np.pi
DEFAULT_OMEGA = 0.1
VARSIGMA, TAU = 0.05, 5.0


class ScenarioKind(str, Enum):
    IV_PI = "iv"
    IVM_MIX = "ivm"
    SVM_PI = "svm"
    SVMC = "svmc"
    SVMP = "svmp"
    SVM_ZERO = "svm_zero"

    @classmethod
    def parse(cls, name: Union[str, "ScenarioKind"]) -> "ScenarioKind":
        if isinstance(name, ScenarioKind):
            return name
        key = str(name).strip().lower().replace("-", "_")
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise DomainError(f"Unknown scenario '{name}'")


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    n_locations: int
    seed: Optional[int] = None
    omega: float = DEFAULT_OMEGA

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind.parse(self.kind))
        if self.n_locations < 1:
            raise DomainError(f"A scenario needs at least one location, got {self.n_locations}")


@dataclass
class SimulatedScenario:
    """Simulated observations with the generating model and its latent values."""

    scenario: Scenario
    data: Dataset
    spec: ModelSpec
    truth: ParamState


def _labels(lam: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One categorical draw per column of a (K, N) probability table."""
    u = rng.random(lam.shape[1])
    return np.minimum((u[None, :] > np.cumsum(lam, axis=0)).sum(axis=0), lam.shape[0] - 1)


def _independent(kind: ScenarioKind, locs: np.ndarray, rng: np.random.Generator):
    n = locs.shape[0]
    if kind == ScenarioKind.IV_PI:
        m, rho, lam = np.array([np.pi]), np.array([5.0]), np.ones(1)
        spec = ModelSpec(kind=ModelKind.IV)
    else:
        m, rho, lam = np.array([HALF_PI, THREE_HALF_PI]), np.array([5.0, 10.0]), np.array([0.3, 0.7])
        spec = ModelSpec(kind=ModelKind.IVM, K=2)
    zeta = rng.choice(m.size, size=n, p=lam)
    y = rng.vonmises(m[zeta], rho[zeta])
    truth = ParamState(m=m, phi=np.log(rho), lam=lam, zeta=zeta if m.size > 1 else None)
    return spec, truth, y


def _spatial(kind: ScenarioKind, locs: np.ndarray, omega: float, rng: np.random.Generator):
    n = locs.shape[0]
    prior = HierarchicalPrior(VARSIGMA, TAU)
    mean = (1.0, 0.0) if kind == ScenarioKind.SVM_ZERO else (-1.0, 0.0)
    spec = ModelSpec(kind=ModelKind.SVM, gp=GpSpec(omega=omega, sigma=0.5, mean1=mean[0], mean2=mean[1]), conc_prior=prior)
    cov = build_cov(locs, spec.gp)
    m, z1, z2 = projected_gp_sample(spec.gp, locs, rng, cov)
    nu = np.array([np.log(3.0)])
    phi = nu[:, None] + VARSIGMA * rng.standard_normal((1, n))
    y = rng.vonmises(m, np.exp(phi[0]))
    z = np.stack([z1 - mean[0], z2 - mean[1]])[None]
    return spec, ParamState(z=z, m=m[None], phi=phi, nu=nu), y


def _cluster(locs: np.ndarray, omega: float, rng: np.random.Generator):
    n = locs.shape[0]
    prior = HierarchicalPrior(VARSIGMA, TAU)
    spec = ModelSpec(
        kind=ModelKind.SVMC,
        K=2,
        gp=GpSpec(omega=omega, sigma=0.5),
        conc_prior=prior,
        component_means=((0.0, 1.0), (0.0, -1.0)),
    )
    cov = build_cov(locs, spec.gp)
    z, m = np.empty((2, 2, n)), np.empty((2, n))
    for k in range(2):
        gp = spec.component_gp(k)
        m[k], z1, z2 = projected_gp_sample(gp, locs, rng, cov)
        z[k] = np.stack([z1 - gp.mean1, z2 - gp.mean2])
    nu = np.log(np.array([3.0, 8.0]))
    phi = nu[:, None] + VARSIGMA * rng.standard_normal((2, n))
    lam = np.array([0.5, 0.5])
    zeta = rng.choice(2, size=n, p=lam)
    idx = np.arange(n)
    y = rng.vonmises(m[zeta, idx], np.exp(phi[zeta, idx]))
    return spec, ParamState(z=z, m=m, phi=phi, nu=nu, lam=lam, zeta=zeta), y


def _prob(locs: np.ndarray, omega: float, rng: np.random.Generator):
    n = locs.shape[0]
    spec = ModelSpec(kind=ModelKind.SVMP, K=2, gp=GpSpec(omega=omega, sigma=1.0), conc_prior=GammaPrior(1.0, 1.0))
    cov = build_cov(locs, spec.gp)
    z = (rng.standard_normal(n) @ cov.chol.T)[None]
    lam = generalized_inverse_logit(z)
    zeta = _labels(lam, rng)
    m, rho = np.array([HALF_PI, THREE_HALF_PI]), np.array([5.0, 10.0])
    y = rng.vonmises(m[zeta], rho[zeta])
    return spec, ParamState(z=z, m=m, phi=np.log(rho), lam=lam, zeta=zeta), y


def simulate_scenario(scenario: Scenario, rng: Optional[np.random.Generator] = None) -> SimulatedScenario:
    """Draws locations from Dirichlet(1, 1, 1) and observations from the scenario's generator.

    Generators:
        iv: vM(π, 5).
        ivm: 0.3·vM(π/2, 5) + 0.7·vM(3π/2, 10).
        svm / svm_zero: SvM with σ = 0.5, μ = (−1, 0) or (1, 0), ρ ≈ 3.
        svmc: SvM-c with μ₁ = (0, 1), μ₂ = (0, −1), σ = 0.5, ρ ≈ (3, 8), λ = (½, ½).
        svmp: SvM-p with σ = 1, μ = 0, m = (π/2, 3π/2), ρ = (5, 10).
    The kernel length scale is `scenario.omega`; concentrations of the spatial
    scenarios vary by location around the stated value with ς = 0.05.

    Args:
        scenario: What to simulate.
        rng: Generator; defaults to one seeded with `scenario.seed`.
    """
    rng = rng if rng is not None else np.random.default_rng(scenario.seed)
    locs = rng.dirichlet(np.ones(3), size=scenario.n_locations)
    kind = scenario.kind
    if kind in (ScenarioKind.IV_PI, ScenarioKind.IVM_MIX):
        spec, truth, y = _independent(kind, locs, rng)
    elif kind in (ScenarioKind.SVM_PI, ScenarioKind.SVM_ZERO):
        spec, truth, y = _spatial(kind, locs, scenario.omega, rng)
    elif kind == ScenarioKind.SVMC:
        spec, truth, y = _cluster(locs, scenario.omega, rng)
    else:
        spec, truth, y = _prob(locs, scenario.omega, rng)
    logger.info(f"Simulated {scenario.n_locations} observations for scenario '{kind.value}'")
    return SimulatedScenario(scenario, Dataset(locs, y), spec, truth)


def save_truth(sim: SimulatedScenario, path: Union[str, Path]):
    """Writes the scenario, generating spec and latent values as JSON."""
    payload = {
        "scenario": sim.scenario.kind.value,
        "n_locations": sim.scenario.n_locations,
        "seed": sim.scenario.seed,
        "omega": sim.scenario.omega,
        "spec": sim.spec.to_dict(),
        "truth": sim.truth.to_dict(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
    logger.info(f"Wrote ground truth to {path}")
