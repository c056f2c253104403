"""Leapfrog Hamiltonian Monte Carlo with dual-averaging step-size adaptation."""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Tuple

import numpy as np

from src.errors import DomainError

logger = logging.getLogger(__name__)

LogProbGrad = Callable[[np.ndarray], Tuple[float, np.ndarray]]

# Energy errors above this are counted as divergent transitions.
MAX_ENERGY_ERROR = 1000.0


@dataclass(frozen=True)
class HmcConfig:
    """Step size ε, leapfrog steps, diagonal mass M and the warmup adaptation switch."""

    step_size: float = 0.1
    leapfrog_steps: int = 10
    mass: Optional[np.ndarray] = None
    adapt: bool = True
    target_accept: float = 0.8

    def __post_init__(self):
        if not self.step_size > 0.0:
            raise DomainError(f"HMC step size must be > 0, got {self.step_size}")
        if self.leapfrog_steps < 1:
            raise DomainError(f"HMC needs at least one leapfrog step, got {self.leapfrog_steps}")
        if self.mass is not None and np.any(np.asarray(self.mass) <= 0.0):
            raise DomainError("HMC mass entries must be > 0")
        if not 0.0 < self.target_accept < 1.0:
            raise DomainError(f"Target acceptance must lie in (0, 1), got {self.target_accept}")

    def mass_for(self, dim: int) -> np.ndarray:
        if self.mass is None:
            return np.ones(dim)
        mass = np.asarray(self.mass, dtype=float)
        if mass.shape != (dim,):
            raise DomainError(f"Mass vector has shape {mass.shape}, expected ({dim},)")
        return mass


@dataclass
class HmcResult:
    q: np.ndarray
    accepted: bool
    log_prob: float
    grad: np.ndarray
    energy_error: float
    accept_prob: float
    divergent: bool = False


def leapfrog(
    q: np.ndarray, p: np.ndarray, grad: np.ndarray, logp_and_grad: LogProbGrad, step_size: float, n_steps: int, mass
) -> Tuple[np.ndarray, np.ndarray, float, np.ndarray]:
    """Integrates Hamilton's equations for `n_steps` steps; returns (q, p, log_prob, grad)."""
    q = np.array(q, dtype=float)
    p = p + 0.5 * step_size * grad
    logp = -np.inf
    for i in range(n_steps):
        q = q + step_size * p / mass
        logp, grad = logp_and_grad(q)
        if not (np.isfinite(logp) and np.all(np.isfinite(grad))):
            return q, p, -np.inf, grad
        if i < n_steps - 1:
            p = p + step_size * grad
    p = p + 0.5 * step_size * grad
    return q, p, logp, grad


def hmc_step(
    q: np.ndarray,
    logp_and_grad: LogProbGrad,
    config: HmcConfig,
    rng: np.random.Generator,
    current: Optional[Tuple[float, np.ndarray]] = None,
) -> HmcResult:
    """One HMC transition: momentum refresh, leapfrog trajectory, Metropolis correction.

    A trajectory reaching a non-finite log density or gradient is rejected and
    flagged as divergent; the returned state is then the input state.

    Args:
        q: Current position.
        logp_and_grad: Returns (log density, gradient) at a position.
        config: Step size, steps and mass.
        rng: Seeded numpy generator.
        current: (log density, gradient) at `q` if already known.
    """
    q = np.asarray(q, dtype=float)
    mass = config.mass_for(q.size)
    logp0, grad0 = current if current is not None else logp_and_grad(q)
    p0 = rng.standard_normal(q.size) * np.sqrt(mass)
    h0 = -logp0 + 0.5 * np.sum(p0 * p0 / mass)
    q1, p1, logp1, grad1 = leapfrog(q, p0, grad0, logp_and_grad, config.step_size, config.leapfrog_steps, mass)
    h1 = -logp1 + 0.5 * np.sum(p1 * p1 / mass) if np.isfinite(logp1) else np.inf
    energy_error = float(h1 - h0)
    divergent = not np.isfinite(energy_error) or energy_error > MAX_ENERGY_ERROR
    accept_prob = 0.0 if divergent else float(min(1.0, np.exp(-energy_error)))
    if not divergent and rng.uniform() < accept_prob:
        return HmcResult(q1, True, float(logp1), grad1, energy_error, accept_prob)
    if divergent:
        logger.debug(f"Divergent HMC transition (energy error {energy_error})")
    return HmcResult(q, False, float(logp0), grad0, energy_error, accept_prob, divergent)


class DualAveraging:
    """Nesterov dual averaging of log ε towards a target acceptance probability."""

    def __init__(self, initial_step: float, target: float = 0.8, gamma: float = 0.05, t0: float = 10.0, kappa: float = 0.75):
        self.target = target
        self.gamma = gamma
        self.t0 = t0
        self.kappa = kappa
        self.restart(initial_step)

    def restart(self, step_size: float):
        self.mu = np.log(10.0 * step_size)
        self.log_step = np.log(step_size)
        self.log_step_bar = 0.0
        self.h_bar = 0.0
        self.iteration = 0

    def update(self, accept_prob: float) -> float:
        """Feeds one acceptance probability and returns the next step size."""
        self.iteration += 1
        t = self.iteration
        w = 1.0 / (t + self.t0)
        self.h_bar = (1.0 - w) * self.h_bar + w * (self.target - accept_prob)
        self.log_step = self.mu - np.sqrt(t) * self.h_bar / self.gamma
        eta = t ** (-self.kappa)
        self.log_step_bar = eta * self.log_step + (1.0 - eta) * self.log_step_bar
        return float(np.exp(self.log_step))

    @property
    def final_step(self) -> float:
        return float(np.exp(self.log_step_bar)) if self.iteration else float(np.exp(self.log_step))


@dataclass
class _Welford:
    n: int = 0
    mean: Optional[np.ndarray] = None
    m2: Optional[np.ndarray] = None

    def add(self, x: np.ndarray):
        self.n += 1
        if self.mean is None:
            self.mean = np.array(x, dtype=float)
            self.m2 = np.zeros_like(self.mean)
            return
        delta = x - self.mean
        self.mean = self.mean + delta / self.n
        self.m2 = self.m2 + delta * (x - self.mean)

    def regularized_variance(self) -> np.ndarray:
        var = self.m2 / max(self.n - 1, 1)
        return (self.n / (self.n + 5.0)) * var + 1e-3 * (5.0 / (self.n + 5.0))


@dataclass
class AdaptiveHmc:
    """HMC kernel that adapts ε (whole warmup) and a diagonal mass (late warmup window).

    After the mass window closes the dual averaging restarts from the current ε.
    When warmup ends ε is frozen at the averaged value.
    """

    config: HmcConfig
    n_warmup: int
    dim: int
    divergences: int = 0
    n_accepted: int = 0
    n_steps: int = 0
    _averager: DualAveraging = field(init=False)
    _window: _Welford = field(init=False)

    def __post_init__(self):
        self.config = replace(self.config, mass=self.config.mass_for(self.dim))
        self._averager = DualAveraging(self.config.step_size, target=self.config.target_accept)
        self._window = _Welford()
        self.window_start = self.n_warmup // 2
        self.window_end = max(self.window_start + 1, self.n_warmup - max(self.n_warmup // 8, 1))

    def step(self, q: np.ndarray, logp_and_grad: LogProbGrad, rng: np.random.Generator, iteration: int) -> HmcResult:
        result = hmc_step(q, logp_and_grad, self.config, rng)
        self.n_steps += 1
        self.n_accepted += int(result.accepted)
        self.divergences += int(result.divergent)
        if self.config.adapt and iteration < self.n_warmup:
            self._adapt(result, iteration)
        return result

    def _adapt(self, result: HmcResult, iteration: int):
        step = self._averager.update(result.accept_prob)
        if self.window_start <= iteration < self.window_end:
            self._window.add(result.q)
        if iteration == self.window_end - 1 and self._window.n >= 10:
            mass = 1.0 / self._window.regularized_variance()
            self.config = replace(self.config, mass=mass)
            self._averager.restart(step)
            logger.debug(f"Diagonal mass adapted from {self._window.n} warmup draws")
        if iteration == self.n_warmup - 1:
            step = self._averager.final_step
            logger.debug(f"Warmup finished; step size fixed at {step:.4g}")
        self.config = replace(self.config, step_size=float(step))

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_steps if self.n_steps else 0.0
