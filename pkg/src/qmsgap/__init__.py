"""Spectral-gap comparison for quantum Markov semigroups on M_d(C).

A faithful invariant state induces a family of inner products indexed by
operator monotone functions f with f(1) = 1 (GNS, KMS, BKM, the power
family and everything in between).  This package builds GKSL semigroups,
realizes the f-inner products through the modular weight matrix, computes
f-spectral gaps from the symmetrized generator on the decaying subspace,
and certifies by seeded randomized testing that the GNS gap lower-bounds
every f-gap, along with the surrounding structure (contractivity,
transpose symmetry of the gap, the power-curve shape, detailed-balance
collapse and the degenerate fixed-point variant).
"""

from .errors import QmsGapError
from .gap import (
    GapCurve,
    GapReport,
    check_f_contractivity,
    decaying_subspace,
    empirical_decay_rate,
    f_operator_norm,
    gap_curve,
    spectral_gap_f,
)
from .harness import (
    CampaignConfig,
    CampaignReport,
    acceptance_config,
    degenerate_block_model,
    detailed_balance_model,
    random_detailed_balance,
    run_campaign,
    strict_gap_search,
)
from .linalg import (
    HermitianEigen,
    Superoperator,
    choi_matrix,
    herm_eig,
    matrix_function,
    multiplication_superop,
    superop_from_map,
    unvec,
    vec,
)
from .metric import (
    FMetric,
    QuadraticForm,
    f_adjoint,
    f_gram,
    f_inner,
    f_metric,
    f_norm,
    loewner_order_probe,
    modular_flow,
    modular_superop,
    moreau_form,
)
from .monotone import (
    MonotoneFunction,
    anti_gns,
    bkm,
    check_om1_bounds,
    closed_form,
    fit_loewner_measure,
    from_measure,
    gns,
    h_kernel,
    kms,
    power,
    transpose,
)
from .qms import (
    DensityMatrix,
    FixedPointStructure,
    GKSLModel,
    check_invariance,
    density_matrix,
    depolarizing_qubit,
    fixed_point_structure,
    generator,
    invariant_state,
    kadison_schwarz_probe,
    random_faithful_model,
    random_model,
    semigroup,
    thermal_qubit,
)

__version__ = "0.1.0"
