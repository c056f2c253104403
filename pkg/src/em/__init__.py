"""Regularized EM initializers for iVM, SvM-c and SvM-p."""

from src.em.common import (
    EmConfig,
    EmResult,
    Responsibilities,
    em_result_to_state,
    gradient_ascent,
    load_init,
    save_init,
)
from src.em.ivm_em import em_ivm, ivm_em_spec
from src.em.svmc_em import em_svmc, nu_update
from src.em.svmp_em import em_svmp, logit_field_gradient, permute_components

__all__ = [
    "EmConfig",
    "EmResult",
    "Responsibilities",
    "em_ivm",
    "em_result_to_state",
    "em_svmc",
    "em_svmp",
    "gradient_ascent",
    "ivm_em_spec",
    "load_init",
    "logit_field_gradient",
    "nu_update",
    "permute_components",
    "save_init",
]
