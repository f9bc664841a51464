"""Rademacher-complexity tools for polynomial neural networks."""

from .norms import (
    Exponent,
    as_exponent,
    dual_exponent,
    holder_extremal,
    matrix_norm_qp,
    max_row_index_lq,
    row_norms,
    vector_norm,
)
from .polynet import (
    ClassSpec,
    FeasibilityReport,
    PolyNet,
    check_feasibility,
    constraint_threshold,
    forward,
    forward_prefix,
    forward_suffix,
    forward_trace,
    propagate_norm_bound,
    sample_feasible_net,
    sample_inputs,
)
from .bounds import (
    BoundReport,
    composition_bound,
    depth_dependent_bound,
    depth_independent_bound,
    gamma_of_net,
    logbar,
    min_ratio_bound,
    perturbation_bound,
    prior_bound_exponential,
    prior_bound_spectral,
    r_dependent_bound,
)
from .alternate import (
    SamplerConfig,
    build_alternative_net,
    decompose_at,
    empirical_sup_gap,
    perturbation_lemma_bound,
    rank1_approx,
    rank1_residual_closed_form,
)
from .rademacher import (
    EstimateResult,
    OptimizerConfig,
    brute_force_sup,
    estimate,
    net_gradient,
    one_layer_closed_form,
)

__version__ = "0.1.0"
