"""Circular distributions, Bessel ratios and angular summary statistics."""

from src.circular.angles import TWO_PI, Angle, arctan_star, arctan_star_grad, circular_distance, wrap_angle
from src.circular.projected_normal import Pn2Params, pn2_circular_variance, pn2_density, pn2_sample
from src.circular.summary import CircularSummary, circular_correlation, circular_summary
from src.circular.von_mises import (
    VonMisesParams,
    bessel_i_ratio,
    inverse_bessel_ratio,
    log_bessel_i0,
    vm_log_density,
    vm_log_pdf,
    vm_mixture_log_density,
    vm_sample,
)

__all__ = [
    "TWO_PI",
    "Angle",
    "CircularSummary",
    "Pn2Params",
    "VonMisesParams",
    "arctan_star",
    "arctan_star_grad",
    "bessel_i_ratio",
    "circular_correlation",
    "circular_distance",
    "circular_summary",
    "inverse_bessel_ratio",
    "log_bessel_i0",
    "pn2_circular_variance",
    "pn2_density",
    "pn2_sample",
    "vm_log_density",
    "vm_log_pdf",
    "vm_mixture_log_density",
    "vm_sample",
]
