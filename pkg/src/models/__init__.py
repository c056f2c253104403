"""Direction models: specifications, latent states, densities and gradients."""

from src.models.base_model import BaseModel
from src.models.factory import create_model, model_for_spec
from src.models.independent import IndependentVonMises
from src.models.links import generalized_inverse_logit
from src.models.model_spec import GammaPrior, HierarchicalPrior, ModelKind, ModelSpec, VonMisesMeanPrior
from src.models.operations import grad_svm, grad_svmp, log_likelihood, log_posterior
from src.models.param_state import ParamState
from src.models.spatial import CENTERED, NONCENTERED, SpatialVonMises
from src.models.spatial_cluster import SpatialClusterVonMises
from src.models.spatial_prob import SpatialProbVonMises

__all__ = [
    "CENTERED",
    "NONCENTERED",
    "BaseModel",
    "GammaPrior",
    "HierarchicalPrior",
    "IndependentVonMises",
    "ModelKind",
    "ModelSpec",
    "ParamState",
    "SpatialClusterVonMises",
    "SpatialProbVonMises",
    "SpatialVonMises",
    "VonMisesMeanPrior",
    "create_model",
    "generalized_inverse_logit",
    "grad_svm",
    "grad_svmp",
    "log_likelihood",
    "log_posterior",
    "model_for_spec",
]
