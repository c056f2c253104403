"""Sample circular mean, variance and the Jammalamadaka–Sarma correlation."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from src.circular.angles import Angle, arctan_star
from src.errors import DomainError

logger = logging.getLogger(__name__)

# Resultant lengths below this are treated as zero when locating the mean.
ZERO_RESULTANT = 1e-12


@dataclass(frozen=True)
class CircularSummary:
    """Circular mean, variance and mean resultant length of a sample.

    `degenerate` is True when the resultant vanishes; the mean is then reported as π.
    """

    mean: Angle
    variance: float
    resultant_length: float
    degenerate: bool = False


def circular_summary(samples: Union[Sequence[float], np.ndarray], weights: Optional[np.ndarray] = None) -> CircularSummary:
    """Summarises angles through the mean of their unit vectors.

    Args:
        samples: Angles in radians.
        weights: Optional non-negative weights, one per sample.

    Returns:
        CircularSummary with variance = 1 − resultant_length.

    Raises:
        DomainError: If `samples` is empty or the weights do not match.
    """
    y = np.asarray([float(s) for s in samples] if isinstance(samples, list) else samples, dtype=float).reshape(-1)
    if y.size == 0:
        raise DomainError("circular_summary needs at least one sample")
    if weights is None:
        w = np.full(y.size, 1.0 / y.size)
    else:
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape != y.shape or np.any(w < 0.0) or w.sum() <= 0.0:
            raise DomainError("circular_summary weights must be non-negative, non-zero and match the samples")
        w = w / w.sum()
    c = float(np.dot(w, np.cos(y)))
    s = float(np.dot(w, np.sin(y)))
    resultant = float(min(np.hypot(c, s), 1.0))
    if resultant < ZERO_RESULTANT:
        logger.debug("Zero resultant length; reporting circular mean as pi")
        return CircularSummary(Angle(np.pi), 1.0, 0.0, degenerate=True)
    return CircularSummary(Angle(arctan_star(c, s)), 1.0 - resultant, resultant)


def circular_correlation(a: Union[Sequence[float], np.ndarray], b: Union[Sequence[float], np.ndarray]) -> float:
    """Jammalamadaka–Sarma sample correlation between two paired angle sequences.

    Σ sin(a − ā) sin(b − b̄) / √(Σ sin²(a − ā) Σ sin²(b − b̄)), where ā and b̄ are
    the sample circular means. Returns 0 when either sequence has no spread.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise DomainError(f"circular_correlation needs equal lengths, got {a.size} and {b.size}")
    if a.size < 2:
        raise DomainError("circular_correlation needs at least two pairs")
    sa = np.sin(a - circular_summary(a).mean.value)
    sb = np.sin(b - circular_summary(b).mean.value)
    denom = np.sqrt(np.sum(sa * sa) * np.sum(sb * sb))
    if denom == 0.0:
        return 0.0
    return float(np.clip(np.sum(sa * sb) / denom, -1.0, 1.0))
