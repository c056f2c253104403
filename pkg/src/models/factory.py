"""Factory functions turning model names or specs into configured model objects."""

import logging
from typing import Any, Dict, Optional, Union

from src.models.base_model import BaseModel
from src.models.independent import IndependentVonMises
from src.models.model_spec import ModelKind, ModelSpec
from src.models.spatial import SpatialVonMises
from src.models.spatial_cluster import SpatialClusterVonMises
from src.models.spatial_prob import SpatialProbVonMises

logger = logging.getLogger(__name__)


def _instantiate(kind: ModelKind) -> BaseModel:
    if kind in (ModelKind.IV, ModelKind.IVM):
        return IndependentVonMises(kind)
    if kind == ModelKind.SVM:
        return SpatialVonMises()
    if kind == ModelKind.SVMC:
        return SpatialClusterVonMises()
    return SpatialProbVonMises()


def create_model(name: Union[str, ModelKind], config: Optional[Dict[str, Any]] = None) -> Optional[BaseModel]:
    """Creates and configures a model by name ('iv', 'ivm', 'svm', 'svmc', 'svmp').

    Args:
        name: Model kind; hyphens and case are ignored ('SvM-c' works).
        config: The model's config section; None keeps the class defaults.

    Returns:
        A configured model, or None if the name is unknown or the config invalid.
    """
    try:
        kind = ModelKind.parse(name)
    except ValueError:
        logger.error(f"Unknown model type: '{name}'")
        return None
    try:
        model = _instantiate(kind)
        if config:
            model.configure(config)
    except ValueError as e:
        logger.error(f"Invalid configuration for model '{kind.value}': {e}", exc_info=True)
        return None
    logger.info(f"Model '{kind.value}' created with K={model.spec.K}")
    return model


def model_for_spec(spec: ModelSpec) -> BaseModel:
    """Model object evaluating exactly the given specification."""
    model = _instantiate(spec.kind)
    if isinstance(model, IndependentVonMises):
        model.default_K = spec.K
    model.spec = spec
    model._cov_cache = None
    return model
