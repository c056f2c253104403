"""Shared pieces of the regularized EM initializers.

The trace each algorithm records is the expected conditional log posterior
under the current responsibilities plus their entropy, evaluated after the
M-step. That quantity is bounded by the marginal log posterior and never
decreases, even though the plain expected conditional log posterior can
move down when the responsibilities change.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.optimize import linear_sum_assignment
from scipy.special import softmax, xlogy

from src.circular.angles import arctan_star, circular_distance
from src.circular.von_mises import inverse_bessel_ratio
from src.dataset import Dataset
from src.errors import DomainError, NumericError
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState

logger = logging.getLogger(__name__)

# Columns of a responsibility matrix must sum to 1 within this.
COLUMN_TOLERANCE = 1e-12
# Concentrations are kept above this so that log ρ stays finite.
RHO_FLOOR = 1e-6
# Largest resultant length handed to the inverse Bessel ratio.
MAX_RESULTANT = 1.0 - 1e-12
# Weight of the k-means assignment in the initial responsibilities.
INIT_CONFIDENCE = 0.9
# Backtracking gives up after this many halvings within one step.
MAX_HALVINGS = 60


@dataclass(frozen=True)
class Responsibilities:
    """P(ζ_ℓ = k | y, θ) as a (K, N) matrix."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 2:
            raise DomainError(f"Responsibilities must be a (K, N) matrix, got shape {r.shape}")
        if np.any(r < 0.0) or np.any(r > 1.0 + COLUMN_TOLERANCE):
            raise DomainError("Responsibilities must lie in [0, 1]")
        if r.shape[1] and np.max(np.abs(r.sum(axis=0) - 1.0)) > COLUMN_TOLERANCE:
            raise DomainError("Responsibility columns must sum to 1")
        object.__setattr__(self, "r", r)

    @classmethod
    def from_log_weights(cls, log_w: np.ndarray) -> "Responsibilities":
        """Normalises unnormalised log weights column by column."""
        r = softmax(np.asarray(log_w, dtype=float), axis=0)
        return cls(r / r.sum(axis=0, keepdims=True))

    @property
    def K(self) -> int:
        return int(self.r.shape[0])

    @property
    def N(self) -> int:
        return int(self.r.shape[1])

    def entropy(self, weights: Optional[np.ndarray] = None) -> float:
        w = np.ones(self.N) if weights is None else weights
        return float(-np.sum(xlogy(self.r, self.r) * w))

    def labels(self) -> np.ndarray:
        return np.argmax(self.r, axis=0)


@dataclass(frozen=True)
class EmConfig:
    """Settings shared by the EM algorithms.

    Attributes:
        max_iters: Outer E/M iterations.
        tol: Absolute change in the objective that counts as converged.
        inner_iters: Gradient-ascent steps per M-step block.
        step_size: Initial gradient-ascent step; halved on every rejected step.
        min_step: Steps below this end the block.
        restarts: Independent runs; the highest final objective wins.
    """

    max_iters: int = 500
    tol: float = 1e-6
    inner_iters: int = 25
    step_size: float = 0.1
    min_step: float = 1e-12
    restarts: int = 1

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tol > 0.0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.inner_iters < 1 or not self.step_size > 0.0 or self.restarts < 1:
            raise DomainError("inner_iters, step_size and restarts must be positive")

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]]) -> "EmConfig":
        """Builds the settings from the `em` config section."""
        config = config or {}
        return cls(
            max_iters=int(config.get("max_iters", cls.max_iters)),
            tol=float(config.get("tol", cls.tol)),
            inner_iters=int(config.get("inner_iters", cls.inner_iters)),
            step_size=float(config.get("step_size", cls.step_size)),
            min_step=float(config.get("min_step", cls.min_step)),
            restarts=int(config.get("restarts", cls.restarts)),
        )


@dataclass
class EmResult:
    """Final estimate of one EM run and its objective traces.

    `state` is in the model's own coordinates (GP deviations, log-concentrations)
    so it can seed a chain directly.
    """

    spec: ModelSpec
    state: ParamState
    resp: Responsibilities
    trace: List[float] = field(default_factory=list)
    marginal_trace: List[float] = field(default_factory=list)
    converged: bool = False
    n_iters: int = 0
    seed: Optional[int] = None

    @property
    def objective(self) -> float:
        return self.trace[-1] if self.trace else float("-inf")

    @property
    def lam(self) -> Optional[np.ndarray]:
        return self.state.lam

    @property
    def m(self) -> np.ndarray:
        return self.state.m

    @property
    def rho(self) -> np.ndarray:
        return self.state.rho

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.spec.name,
            "spec": self.spec.to_dict(),
            "state": self.state.to_dict(),
            "trace": self.trace,
            "marginal_trace": self.marginal_trace,
            "converged": self.converged,
            "n_iters": self.n_iters,
            "seed": self.seed,
        }


def initial_responsibilities(directions: np.ndarray, K: int, rng: np.random.Generator) -> Tuple[Responsibilities, np.ndarray]:
    """k-means++ on the unit vectors (cos y, sin y), softened to 0.9 / 0.1.

    Returns:
        The responsibilities and the circular mean of each cluster.
    """
    y = np.asarray(directions, dtype=float)
    if K == 1:
        r = np.ones((1, y.size))
        return Responsibilities(r), np.array([weighted_circular_mean(y, r[0])])
    points = np.column_stack([np.cos(y), np.sin(y)])
    centroids, labels = kmeans2(points, K, minit="++", seed=rng)
    onehot = np.zeros((K, y.size))
    onehot[labels, np.arange(y.size)] = 1.0
    r = INIT_CONFIDENCE * onehot + (1.0 - INIT_CONFIDENCE) / K
    centres = np.array([arctan_star(c[0], c[1]) if np.hypot(*c) > 0.0 else np.pi for c in centroids])
    return Responsibilities(r), centres


def align_clusters(centres: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Permutation mapping components to clusters with the smallest total circular distance.

    Returns:
        `perm` such that cluster `perm[k]` is assigned to component k.
    """
    cost = circular_distance(np.asarray(targets)[:, None], np.asarray(centres)[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cols[np.argsort(rows)]


def weighted_circular_mean(y: np.ndarray, weights: np.ndarray, fallback: float = np.pi) -> float:
    """arctan*(Σ w cos y, Σ w sin y), or `fallback` when the resultant vanishes."""
    c = float(np.dot(weights, np.cos(y)))
    s = float(np.dot(weights, np.sin(y)))
    if np.hypot(c, s) <= 1e-12 * max(float(np.sum(weights)), 1.0):
        return float(fallback)
    return float(arctan_star(c, s))


def concentration_update(weighted_cos: float, total: float, penalty: float = 0.0, current: float = 1.0) -> float:
    """Maximiser of ρ·(Σ r cos(y − m)) − (Σ r) log I₀(ρ) − penalty·ρ.

    The stationary point solves I₁(ρ)/I₀(ρ) = (Σ r cos − penalty)/Σ r; a
    non-positive right-hand side puts the maximum at the floor.
    """
    if total <= 1e-12:
        return current
    target = (weighted_cos - penalty) / total
    if target <= 0.0:
        return RHO_FLOOR
    return max(inverse_bessel_ratio(min(target, MAX_RESULTANT)), RHO_FLOOR)


@dataclass
class AscentResult:
    x: np.ndarray
    value: float
    accepted: int
    halvings: int


def gradient_ascent(
    objective: Callable[[np.ndarray], Any],
    gradient: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    config: EmConfig,
    scale: Any = 1.0,
    elementwise: bool = False,
) -> AscentResult:
    """Backtracking gradient ascent that only ever accepts improvements.

    Args:
        objective: Function to maximise. With `elementwise` it returns one value
            per entry of x and the entries are treated as separable.
        gradient: Its gradient.
        x0: Starting point.
        config: Supplies `inner_iters`, `step_size` and `min_step`.
        scale: Positive preconditioner multiplying the gradient.
        elementwise: Accept or halve the step separately for every entry.

    Raises:
        NumericError: If the gradient is not finite at the starting point.
    """
    x = np.array(x0, dtype=float)
    value = np.asarray(objective(x), dtype=float)
    step = np.full(x.shape, config.step_size)
    accepted = halvings = 0
    for it in range(config.inner_iters):
        g = np.asarray(gradient(x), dtype=float)
        if not np.all(np.isfinite(g)):
            if it == 0:
                raise NumericError("EM gradient is not finite at the starting point")
            logger.warning("EM gradient became non-finite; keeping the last accepted point")
            break
        direction = scale * g
        pending = step >= config.min_step
        moved = np.zeros(x.shape, dtype=bool)
        for _ in range(MAX_HALVINGS):
            if not np.any(pending):
                break
            trial = np.where(pending, x + step * direction, x)
            trial_value = np.asarray(objective(trial), dtype=float)
            ok = pending & np.isfinite(trial_value) & (trial_value >= value)
            x = np.where(ok, trial, x)
            value = np.where(ok, trial_value, value) if elementwise else (trial_value if np.any(ok) else value)
            moved |= ok
            pending &= ~ok
            step = np.where(pending, step / 2.0, step)
            halvings += int(np.any(pending))
            pending &= step >= config.min_step
        if not np.any(moved):
            break
        accepted += 1
        step = np.where(moved, step * 2.0, step)
    if halvings:
        logger.debug(f"Gradient ascent halved its step {halvings} times")
    return AscentResult(x=x, value=float(np.sum(value)), accepted=accepted, halvings=halvings)


def check_data(data: Dataset):
    if len(data) == 0:
        raise DomainError("EM needs at least one observation")


def restart_seeds(rng: np.random.Generator, restarts: int) -> List[int]:
    return [int(s) for s in rng.integers(0, 2**32 - 1, size=restarts, dtype=np.uint64)]


def best_of_restarts(run_once: Callable[[np.random.Generator], EmResult], config: EmConfig, rng: np.random.Generator, threads: int = 1) -> EmResult:
    """Runs `config.restarts` independent fits and keeps the highest final objective."""
    seeds = restart_seeds(rng, config.restarts)

    def run(seed: int) -> EmResult:
        result = run_once(np.random.default_rng(seed))
        result.seed = seed
        return result

    if threads > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, seeds))
    else:
        results = [run(seed) for seed in seeds]
    best = max(results, key=lambda res: res.objective)
    if len(results) > 1:
        logger.info(f"Best of {len(results)} EM restarts: objective {best.objective:.4f} (seed {best.seed})")
    return best


def log_convergence(name: str, result: EmResult):
    if result.converged:
        logger.info(f"{name} EM converged after {result.n_iters} iterations, objective {result.objective:.4f}")
    else:
        logger.warning(f"{name} EM stopped at max_iters={result.n_iters} without converging")


def em_result_to_state(result: EmResult, spec: ModelSpec, data: Dataset) -> ParamState:
    """Chain starting state from an EM result fitted with a compatible specification.

    Raises:
        DomainError: If the model kind, K or number of locations differ.
    """
    if result.spec.kind != spec.kind or result.spec.K != spec.K:
        raise DomainError(f"EM result for {result.spec.name} (K={result.spec.K}) cannot seed {spec.name} (K={spec.K})")
    state = result.state.copy()
    if result.resp.N != len(data):
        raise DomainError(f"EM result covers {result.resp.N} observations, data has {len(data)}")
    if spec.kind == ModelKind.SVMC:
        state.zeta = result.resp.labels()
    return state


def save_init(result: EmResult, path: str):
    """Writes an EM result as the JSON init file read by `load_init`."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(result.to_dict(), f, indent=2)
    logger.info(f"EM init for {result.spec.name} written to '{path}'")


def load_init(path: str) -> Tuple[ModelSpec, ParamState]:
    """Reads an init file.

    Raises:
        DomainError: If the file is not a valid init file.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
        return ModelSpec.from_dict(payload["spec"]), ParamState.from_dict(payload["state"])
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as e:
        raise DomainError(f"Could not read EM init file '{path}': {e}") from e
