"""Monte-Carlo oracles for the closed-form prior moments."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np
from scipy.special import softmax

from src.circular.angles import arctan_star, wrap_angle
from src.circular.summary import CircularSummary, circular_correlation, circular_summary
from src.errors import DomainError
from src.gp.kernel import GpSpec, sqexp_kernel

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 100_000


class AngleGenerator(Protocol):
    """Draws angles of shape (n,) for a single site or (n, 2) for a pair of sites."""

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray: ...


@dataclass(frozen=True)
class VonMisesGenerator:
    mean: float
    rho: float

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return wrap_angle(rng.vonmises(self.mean, self.rho, size=n))


@dataclass(frozen=True)
class UniformGenerator:
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(0.0, 2.0 * np.pi, size=n)


@dataclass(frozen=True)
class VonMisesMixtureGenerator:
    """Independent draws from Σ p_k vM(m_k, ρ_k)."""

    ms: Sequence[float]
    rhos: Sequence[float]
    probs: Sequence[float]

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        labels = rng.choice(len(self.probs), size=n, p=np.asarray(self.probs, dtype=float))
        m, rho = np.asarray(self.ms, dtype=float), np.asarray(self.rhos, dtype=float)
        return wrap_angle(rng.vonmises(m[labels], rho[labels]))


@dataclass(frozen=True)
class SvmGenerator:
    """SvM pairs at two sites whose GP coordinates have correlation s.

    Each coordinate field j has mean μ_j and covariance σ²[[1, s], [s, 1]]; the
    site means are arctan* of the field values and observations add vM(·, ρ) noise.
    """

    mu: Sequence[float]
    sigma: float
    s: float
    rho: float

    @classmethod
    def from_locations(cls, gp: GpSpec, x1: Sequence[float], x2: Sequence[float], rho: float) -> "SvmGenerator":
        if not gp.has_constant_means:
            raise DomainError("SvmGenerator needs constant GP means")
        s = sqexp_kernel(x1, x2, gp) / gp.sigma**2
        return cls((float(gp.mean1), float(gp.mean2)), gp.sigma, s, rho)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        cov = self.sigma**2 * np.array([[1.0, self.s], [self.s, 1.0]])
        z1 = rng.multivariate_normal(np.full(2, self.mu[0]), cov, size=n)
        z2 = rng.multivariate_normal(np.full(2, self.mu[1]), cov, size=n)
        m = arctan_star(z1, z2)
        return wrap_angle(rng.vonmises(m, self.rho))


@dataclass(frozen=True)
class SvmpGenerator:
    """SvM-p pairs: zero-mean unit-variance logit fields with correlation s across the two sites.

    Site memberships are drawn from the generalized inverse logit of the
    (K − 1) logits with a zero last logit.
    """

    ms: Sequence[float]
    rhos: Sequence[float]
    s: float

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        K = len(self.ms)
        cov = np.array([[1.0, self.s], [self.s, 1.0]])
        logits = np.zeros((K, n, 2))
        for k in range(K - 1):
            logits[k] = rng.multivariate_normal(np.zeros(2), cov, size=n)
        probs = softmax(logits, axis=0)
        cumulative = np.cumsum(probs, axis=0)
        labels = np.minimum((rng.random((n, 2))[None] > cumulative).sum(axis=0), K - 1)
        m, rho = np.asarray(self.ms, dtype=float), np.asarray(self.rhos, dtype=float)
        return wrap_angle(rng.vonmises(m[labels], rho[labels]))


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Moments of the first site's draws and, for pair generators, the cross-site correlation.

    `mean_cos_difference` is E[cos(Y_ℓ − Y_ℓ′)].
    """

    summary: CircularSummary
    variance_se: float
    n_samples: int
    correlation: Optional[float] = None
    correlation_se: Optional[float] = None
    mean_cos_difference: Optional[float] = None


def _blocks(n_samples: int, block_size: int) -> list:
    full, rest = divmod(n_samples, block_size)
    return [block_size] * full + ([rest] if rest else [])


def mc_moment_oracle(
    generator: AngleGenerator,
    n_samples: int,
    rng: Optional[np.random.Generator] = None,
    block_size: int = DEFAULT_BLOCK_SIZE,
    threads: int = 1,
) -> MonteCarloEstimate:
    """Simulates `generator` in blocks and summarises the draws.

    Each block gets its own child stream spawned from `rng`, and blocks are
    concatenated in order, so results do not depend on `threads`.

    Raises:
        DomainError: If `n_samples` < 1.
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be >= 1, got {n_samples}")
    rng = rng if rng is not None else np.random.default_rng()
    sizes = _blocks(n_samples, block_size)
    streams = [np.random.default_rng(seq) for seq in np.random.SeedSequence(int(rng.integers(2**63))).spawn(len(sizes))]

    def draw(i: int) -> np.ndarray:
        return np.asarray(generator.sample(sizes[i], streams[i]), dtype=float)

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(draw, range(len(sizes))))
    else:
        parts = [draw(i) for i in range(len(sizes))]
    draws = np.concatenate(parts, axis=0)
    logger.debug(f"Monte-Carlo oracle drew {n_samples} samples in {len(sizes)} blocks")

    first = draws if draws.ndim == 1 else draws[:, 0]
    summary = circular_summary(first)
    spread = np.cos(first - summary.mean.value)
    variance_se = float(spread.std(ddof=1) / np.sqrt(first.size)) if first.size > 1 else float("nan")
    if draws.ndim == 1:
        return MonteCarloEstimate(summary, variance_se, n_samples)

    correlation = circular_correlation(draws[:, 0], draws[:, 1])
    block_values = [circular_correlation(p[:, 0], p[:, 1]) for p in parts if p.shape[0] > 1]
    correlation_se = (
        float(np.std(block_values, ddof=1) / np.sqrt(len(block_values))) if len(block_values) > 1 else float("nan")
    )
    return MonteCarloEstimate(
        summary,
        variance_se,
        n_samples,
        correlation=correlation,
        correlation_se=correlation_se,
        mean_cos_difference=float(np.mean(np.cos(draws[:, 0] - draws[:, 1]))),
    )
