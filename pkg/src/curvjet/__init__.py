"""Algebraic curvature two-jets: symmetrizers, curvature actions, Einstein extension."""

__version__ = "0.1.0"

from .spaces import (
    Space,
    Tensor,
    SymBiform,
    permute,
    symmetrize,
    metric_trace,
    sym_product,
    tensor_product,
    random_tensor,
)
from .young import young_apply, tableau_apply, young_eigenvalue, is_member_Ck, random_ck
from .curvature import (
    ricci,
    kn_pair,
    kulkarni,
    decompose,
    star_action,
    pair_derivation,
    jacobi_form,
    is_member_Nk,
    nk_basis,
)
from .jets import (
    TwoJet,
    SectionTwoJet,
    JacobiFit,
    validate_two_jet,
    validate_section_jet,
    random_two_jet,
    random_einstein_one_jet,
    jet_traces,
    sym_jacobi,
    tilde_ops,
    hat_embed,
    weitzenbock_check,
    weitzenbock_special,
    einstein_check,
    einstein_extend,
    extension_solution_dim,
    fit_jacobi_relation,
    two_jet_to_dict,
    two_jet_from_dict,
)
from .polymetric import (
    TruncPoly,
    PolyMetric,
    christoffel,
    curvature_two_jet,
    seed_metric,
    random_poly_metric,
    poly_metric_to_dict,
    poly_metric_from_dict,
)
from .identities import verify_identity, identity_names

__all__ = [
    "__version__",
    "Space",
    "Tensor",
    "SymBiform",
    "permute",
    "symmetrize",
    "metric_trace",
    "sym_product",
    "tensor_product",
    "random_tensor",
    "young_apply",
    "tableau_apply",
    "young_eigenvalue",
    "is_member_Ck",
    "random_ck",
    "ricci",
    "kn_pair",
    "kulkarni",
    "decompose",
    "star_action",
    "pair_derivation",
    "jacobi_form",
    "is_member_Nk",
    "nk_basis",
    "TwoJet",
    "SectionTwoJet",
    "JacobiFit",
    "validate_two_jet",
    "validate_section_jet",
    "random_two_jet",
    "random_einstein_one_jet",
    "jet_traces",
    "sym_jacobi",
    "tilde_ops",
    "hat_embed",
    "weitzenbock_check",
    "weitzenbock_special",
    "einstein_check",
    "einstein_extend",
    "extension_solution_dim",
    "fit_jacobi_relation",
    "two_jet_to_dict",
    "two_jet_from_dict",
    "TruncPoly",
    "PolyMetric",
    "christoffel",
    "curvature_two_jet",
    "seed_metric",
    "random_poly_metric",
    "poly_metric_to_dict",
    "poly_metric_from_dict",
    "verify_identity",
    "identity_names",
]
