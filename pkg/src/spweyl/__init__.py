"""Exact sp(2n) realizations inside the Weyl algebra and their Whittaker modules."""

from .polyalg import LaurentMultiPoly, MultiPoly, parse_poly, shift_substitute, solve_diagonal
from .repmodules import (
    check_module_axioms,
    mb_module,
    nilsson_module,
    pnf_iso_test,
    simplicity_closure,
    weil_module,
)
from .scalars import GaussianRational, format_scalar, parse_scalar
from .sp2n import SpBasisElement, SpElement, basis, bracket, realize, structure_constants, verify_eq1_suite
from .thetamap import (
    GeneratorImages,
    ThetaMap,
    build_theta,
    check_homomorphism,
    classify,
    extract_shape,
    sigma_twist,
    verify_power_identities,
)
from .weighting import check_eq33_compatibility, weighting_fiber, weighting_support
from .weyl import WeylElement, parse_operator, weyl_apply, weyl_commutator, weyl_mul
from .whittaker import WhittakerType, block_constraints, free_basis_reduction, local_nilpotency, whittaker_vectors, ym_apply

__version__ = "0.1.0"

__all__ = [
    "GaussianRational", "parse_scalar", "format_scalar",
    "MultiPoly", "LaurentMultiPoly", "parse_poly", "shift_substitute", "solve_diagonal",
    "WeylElement", "parse_operator", "weyl_mul", "weyl_commutator", "weyl_apply",
    "SpBasisElement", "SpElement", "basis", "realize", "bracket", "structure_constants", "verify_eq1_suite",
    "GeneratorImages", "ThetaMap", "build_theta", "check_homomorphism", "sigma_twist", "extract_shape",
    "classify", "verify_power_identities",
    "nilsson_module", "mb_module", "weil_module", "check_module_axioms", "simplicity_closure", "pnf_iso_test",
    "WhittakerType", "whittaker_vectors", "local_nilpotency", "ym_apply", "free_basis_reduction",
    "block_constraints",
    "weighting_fiber", "weighting_support", "check_eq33_compatibility",
]
