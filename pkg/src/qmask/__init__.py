"""Quantum information masking for finite-dimensional state sets.

Construct deterministic maskers for mutually orthogonal states,
probabilistic post-selected maskers for linearly independent states,
maximize the masking success probability, and verify the masking
property (index-independent marginals) numerically.
"""

from .fixed_reducing import (
    MARGINAL_TOL,
    FixedReducingSet,
    build_distinct_spectrum,
    build_general_spectrum,
    build_uniform_spectrum,
    cyclic_targets,
    from_states,
    targets_with_overlap,
    verify_fixed_reducing,
)
from .hilbert import (
    NORM_TOL,
    OP_TOL,
    RANK_TOL,
    RECON_TOL,
    DensityOperator,
    GramMatrix,
    MultipartiteState,
    Operator,
    SchmidtDecomposition,
    StateVector,
    basis_state,
    fidelity,
    gram,
    hermitian_sqrt,
    linearly_independent,
    overlap,
    partial_trace,
    psd_check,
    schmidt,
    tensor,
    unitary_completion,
)
from .masker import (
    DeterministicMasker,
    MaskingOutcome,
    MaskingReport,
    ProbabilisticMasker,
    build_deterministic,
    build_probabilistic,
    check_deterministic_feasible,
    failure_branches,
    simulate,
    verify_masking,
)
from .optimizer import (
    EfficiencyMatrix,
    TwoStateProblem,
    feasible,
    max_prob_grid_oracle,
    max_prob_two,
    maximize_general,
    probability_curves,
    residual_matrix,
    success_probability,
    uniform_feasibility_boundary,
)

__version__ = "0.1.0"

__all__ = [
    "MARGINAL_TOL",
    "NORM_TOL",
    "OP_TOL",
    "RANK_TOL",
    "RECON_TOL",
    "DensityOperator",
    "DeterministicMasker",
    "EfficiencyMatrix",
    "FixedReducingSet",
    "GramMatrix",
    "MaskingOutcome",
    "MaskingReport",
    "MultipartiteState",
    "Operator",
    "ProbabilisticMasker",
    "SchmidtDecomposition",
    "StateVector",
    "TwoStateProblem",
    "basis_state",
    "build_deterministic",
    "build_distinct_spectrum",
    "build_general_spectrum",
    "build_probabilistic",
    "build_uniform_spectrum",
    "check_deterministic_feasible",
    "cyclic_targets",
    "failure_branches",
    "feasible",
    "fidelity",
    "from_states",
    "gram",
    "hermitian_sqrt",
    "linearly_independent",
    "max_prob_grid_oracle",
    "max_prob_two",
    "maximize_general",
    "overlap",
    "partial_trace",
    "probability_curves",
    "psd_check",
    "residual_matrix",
    "schmidt",
    "simulate",
    "success_probability",
    "targets_with_overlap",
    "tensor",
    "uniform_feasibility_boundary",
    "unitary_completion",
    "verify_fixed_reducing",
    "verify_masking",
]
