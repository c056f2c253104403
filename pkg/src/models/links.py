"""Maps between unconstrained logits and mixing probabilities."""

import numpy as np
from scipy.special import expit, softmax

from src.errors import DomainError


def generalized_inverse_logit(z: np.ndarray) -> np.ndarray:
    """Ψ⁻¹: K−1 logits to K probabilities, the last being 1/(1 + Σ e^{z}).

    Works along the first axis, so `z` of shape (K−1, N) gives (K, N). The
    exponentials are max-shifted; K = 2 is the ordinary logistic function.

    Raises:
        DomainError: If any logit is not finite.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        z = z.reshape(1)
    if not np.all(np.isfinite(z)):
        raise DomainError("generalized_inverse_logit needs finite logits")
    if z.shape[0] == 1:
        first = expit(z[0])
        return np.stack([first, expit(-z[0])])
    padded = np.concatenate([z, np.zeros((1,) + z.shape[1:])], axis=0)
    return softmax(padded, axis=0)


def inverse_logit_to_logits(lam: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    """Inverse of `generalized_inverse_logit`: z_k = log λ_k − log λ_K."""
    lam = np.clip(np.asarray(lam, dtype=float), floor, None)
    return np.log(lam[:-1]) - np.log(lam[-1])


def dirichlet_jacobian_grad(lam: np.ndarray) -> np.ndarray:
    """Gradient of Σ_k log λ_k with respect to the K−1 logits: 1 − Kλ_k."""
    lam = np.asarray(lam, dtype=float)
    return 1.0 - lam.shape[0] * lam[:-1]
