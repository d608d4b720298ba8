"""Exact desk-scale computations for cyclic and group homology of group rings
of word-hyperbolic groups: group models, Bar and twisted chains, geometry of
Cayley graphs, chain-level resolutions, weighted norms and truncated homology."""

from .chains import Chain, TwistedSimplex, UNIT, boundary, connes_B, hochschild_b
from .conjugacy import Section, conjugacy_classes, sigma_section, stable_length
from .geometry import approximating_tree, delta_estimate, geodesic_hull, tree_roundtrip
from .groups import (
    BoundaryTruncation,
    CayleyBall,
    FiniteCyclic,
    FreeGroup,
    FreeProduct,
    InfiniteDihedral,
    InvalidInput,
    ResourceLimit,
    model_from_spec,
)
from .homology import (
    BettiTable,
    TruncationSpec,
    burghelea_check,
    gamma_tors_report,
    group_homology_rips,
    homology,
    per_class_homology,
    truncate_complex,
)
from .norms import NormParams, bound_scan, norm_lambda, seminorm_rho_m
from .resolutions import Bicombing, Nabla, RipsProjection, Theta

__all__ = [
    "Chain", "TwistedSimplex", "UNIT", "boundary", "connes_B", "hochschild_b",
    "Section", "conjugacy_classes", "sigma_section", "stable_length",
    "approximating_tree", "delta_estimate", "geodesic_hull", "tree_roundtrip",
    "BoundaryTruncation", "CayleyBall", "FiniteCyclic", "FreeGroup", "FreeProduct",
    "InfiniteDihedral", "InvalidInput", "ResourceLimit", "model_from_spec",
    "BettiTable", "TruncationSpec", "burghelea_check", "gamma_tors_report",
    "group_homology_rips", "homology", "per_class_homology", "truncate_complex",
    "NormParams", "bound_scan", "norm_lambda", "seminorm_rho_m",
    "Bicombing", "Nabla", "RipsProjection", "Theta",
]
