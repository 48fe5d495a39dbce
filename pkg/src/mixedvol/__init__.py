"""Exact volume polynomials of matroid Chow rings.

Two independent algorithms (a determinant formula over generic vectors and
a deletion/star-subdivision recursion) plus the verification calculus that
characterizes the result: annihilator identities, the degree map, Minkowski
weight decomposition, and Poincare pairing rank checks.
"""

from .fan import (
    BalancingReport,
    Cone,
    MinkowskiWeight,
    Ray,
    SimplicialFan,
    bergman_fan,
    check_balancing,
    cone_key,
    constant_weight,
    deletion_tower,
    flat_vector,
    subdivision_pullback,
)
from .matroid import (
    Chain,
    Flat,
    FlatLattice,
    Matroid,
    MatroidError,
    all_loopless_matroids,
    flat_label,
    random_matroid,
    uniform_matroid,
)
from .poly import (
    DerivativeMonomial,
    Monomial,
    RationalPoly,
    VarId,
    diff_terms,
    fresh_label,
    label_str,
    parse_label,
    poly_from_json_dict,
    poly_to_json_dict,
    pretty,
)
from .volume import (
    AnnihilatorReport,
    BCoefficients,
    ChainMatrix,
    ChowRankReport,
    CrossValidationReport,
    GenericVectors,
    GenericityError,
    VolPolynomial,
    annihilator_check,
    b_coefficients,
    brion_volume,
    chain_matrices,
    chow_rank_checks,
    cross_validate,
    decompose_weight,
    degree_of,
    deletion_volume,
    evaluation_volume_fan,
    generic_projection,
    generic_vectors,
    lift_coloop,
    lift_non_coloop,
    projection_from_generic_vectors,
    retry_budget,
    subdivision_operator,
    subdivision_operator_general,
)

__version__ = "0.1.0"

__all__ = [
    "AnnihilatorReport",
    "BCoefficients",
    "BalancingReport",
    "Chain",
    "ChainMatrix",
    "ChowRankReport",
    "Cone",
    "CrossValidationReport",
    "DerivativeMonomial",
    "Flat",
    "FlatLattice",
    "GenericVectors",
    "GenericityError",
    "Matroid",
    "MatroidError",
    "MinkowskiWeight",
    "Monomial",
    "RationalPoly",
    "Ray",
    "SimplicialFan",
    "VarId",
    "VolPolynomial",
    "all_loopless_matroids",
    "annihilator_check",
    "b_coefficients",
    "bergman_fan",
    "brion_volume",
    "chain_matrices",
    "check_balancing",
    "chow_rank_checks",
    "cone_key",
    "constant_weight",
    "cross_validate",
    "decompose_weight",
    "degree_of",
    "deletion_tower",
    "deletion_volume",
    "diff_terms",
    "evaluation_volume_fan",
    "flat_label",
    "flat_vector",
    "fresh_label",
    "generic_projection",
    "generic_vectors",
    "label_str",
    "lift_coloop",
    "lift_non_coloop",
    "parse_label",
    "poly_from_json_dict",
    "poly_to_json_dict",
    "pretty",
    "projection_from_generic_vectors",
    "random_matroid",
    "retry_budget",
    "subdivision_operator",
    "subdivision_operator_general",
    "subdivision_pullback",
    "uniform_matroid",
]
