"""Entropy and Bregman divergences on spin factors."""

from .algebra import (
    EPS_DEG,
    EPS_POS,
    SpinElement,
    apply_function,
    bullet,
    center,
    pure_state,
    quadratic_rep,
    random_state,
    spectral_decompose,
    state,
    trace_inner,
)
from .capacity import CapacityResult, bregman_project, capacity_closed_form, capacity_finite
from .channels import Channel, apply, dilation, fixpoint_retraction, is_valid, petz_recovery, poissonize
from .divergence import (
    Generator,
    bregman,
    e_lambda,
    generator_from_spec,
    integral_representation,
    local_divergence,
    mixture,
    quadratic,
    shannon,
    shifted_generator,
    tsallis,
)
from .monotonicity import critical_alpha, dilation_criterion, empirical_monotonicity, tsallis_classification

__version__ = "0.1.0"
