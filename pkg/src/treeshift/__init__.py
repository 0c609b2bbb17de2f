"""Exact experiments with the forward and backward shifts on Lipschitz spaces of trees."""

from .errors import (
    ContractError,
    DepthLimitError,
    PreconditionError,
    SpecError,
    TreeShiftError,
    UnsupportedInstanceError,
    VertexError,
)
from .functions import (
    G1,
    G2,
    G3,
    H,
    Eigen,
    FiniteSupport,
    HarmonicLevel,
    Indicator,
    LevelFunction,
    Membership,
    NormReport,
    Resolvent,
    TreeFunction,
    antiderivative,
    derivative,
    growth_check,
    in_little_lipschitz,
    lip_norm,
    m_membership,
)
from .hypercyclic import apply_Rn, beta, criterion_run, forward_not_hypercyclic_probe, free_end_obstruction
from .norms import coeff_row, coefficient_matrix, divergence_certificate, lower_bound_witnesses, operator_norm, spectral_radius_estimate
from .shifts import ShiftOperator, apply_backward, apply_forward, duality_pair
from .spectral import boundary_exclusion_probe, eigen_check, resolvent_probe
from .tree import (
    BoundConstants,
    Homogeneous,
    LevelPeriodic,
    TreeSpec,
    TreeView,
    bound_constants,
    gamma,
    gamma_n,
    hbs_level,
    is_free_end,
    leaf_ancestor_set,
    parent_n,
)

__version__ = "0.1.0"
