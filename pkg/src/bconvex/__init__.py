"""Exact computations with limit polytopes built from the Boxplus operation."""

__version__ = "0.1.0"

from .errors import (
    BConvexError,
    CertificateFailure,
    DegenerateHyperplane,
    DimensionMismatch,
    GuardExceeded,
    InvalidCoefficients,
    NoConvergence,
    NotDisjoint,
    SingularAtOrder,
    SingularInLimit,
)
from .linalg import CramerSolution, LimitHyperplane, boxplus_reconstruct, cramer_infty, det_infty, hyperplane_contains, hyperplane_infty
from .oracle import PRepScalar, PSchedule, approx_value, limit_sweep, phi_p_cramer, phi_p_det, phi_p_hull_member, phi_p_sum
from .polytope import (
    BPolytope,
    IntermediatePoint,
    NestedCoefficients,
    Orthant,
    build_polytope,
    enumerate_intermediates,
    eval_boxplus_combination,
    intermediate_matrix,
    intermediate_point,
    maxtimes_member,
    member,
    two_point_hull,
)
from .scalar import (
    LOWER,
    UPPER,
    SymmetricForm,
    binary_boxplus,
    boxplus_vectors,
    inner_infty,
    inner_infty_regularized,
    nary_boxplus,
    residual_index_set,
    smile_chain,
)
from .separation import Halfspace, SeparationResult, disjointness_check, halfspace_member, outer_hrep, separate_compact_nets, separate_polytopes
