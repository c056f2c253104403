"""Spec-level entry points: likelihood, posterior and the HMC gradients."""

from typing import Tuple

import numpy as np

from src.dataset import Dataset
from src.errors import DomainError
from src.models.factory import model_for_spec
from src.models.model_spec import ModelKind, ModelSpec
from src.models.param_state import ParamState
from src.models.spatial import CENTERED


def _check_size(spec: ModelSpec, state: ParamState, data: Dataset):
    if spec.kind.spatial and state.z is not None and np.asarray(state.z).shape[-1] != len(data):
        raise DomainError(f"State covers {np.asarray(state.z).shape[-1]} locations but the data has {len(data)}")


def log_likelihood(spec: ModelSpec, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
    """log p(y | latents). SvM-c uses the labels in `state.zeta` when `marginalize` is False."""
    _check_size(spec, state, data)
    return model_for_spec(spec).log_likelihood(state, data, marginalize)


def log_posterior(spec: ModelSpec, state: ParamState, data: Dataset, marginalize: bool = True) -> float:
    """Unnormalised log posterior: likelihood plus every prior term of the model."""
    _check_size(spec, state, data)
    return model_for_spec(spec).log_posterior(state, data, marginalize)


def grad_svm(
    spec: ModelSpec, state: ParamState, data: Dataset, parametrization: str = CENTERED, labeled: bool = False
) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients with respect to the polar latents (m, r) or (m̃, r̃), each shaped (K, N).

    Centered mode reads the radii from `state.r_latent`; non-centered mode derives
    (m̃, r̃) from z̃ = L⁻¹z. SvM-c terms are weighted by responsibilities, or by
    the label indicators when `labeled` is set.

    Raises:
        DomainError: For non-SvM specs, or centered mode without radii.
    """
    if spec.kind not in (ModelKind.SVM, ModelKind.SVMC):
        raise DomainError(f"grad_svm needs an SvM or SvM-c spec, got {spec.kind.value}")
    _check_size(spec, state, data)
    model = model_for_spec(spec)
    angle, radius = model.polar_coordinates(state, data, parametrization)
    return model.polar_grad(angle, radius, state, data, parametrization, labeled)


def grad_svmp(spec: ModelSpec, state: ParamState, data: Dataset, parametrization: str = CENTERED) -> np.ndarray:
    """Gradient with respect to the logit latents z (centered) or z̃ (non-centered), shape (K−1, N)."""
    if spec.kind != ModelKind.SVMP:
        raise DomainError(f"grad_svmp needs an SvM-p spec, got {spec.kind.value}")
    _check_size(spec, state, data)
    return model_for_spec(spec).grad_latent(state, data, parametrization)
