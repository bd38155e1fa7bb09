"""Exact computations for Lie algebras over Z/p^k and the p-groups they build."""

from .algebra import BracketAlgebra, ExteriorElement, jacobi_form, named_algebra
from .bockstein import BocksteinData, b2_direct, b2_via_lie, beta, lhs_e3_dims
from .cohomology import build_complex, cohomology, module_ad, module_sym, module_trivial
from .groups import exp_group, gamma_group, log_bracket, predicates, uniform_tower_check
from .lifting import LiftProblem, brute_force_lift_oracle, obstruction, tower_extension_verdict
from .modp import ModMatrix, PrimePower

__version__ = "0.1.0"

__all__ = [
    "BracketAlgebra",
    "ExteriorElement",
    "jacobi_form",
    "named_algebra",
    "BocksteinData",
    "b2_direct",
    "b2_via_lie",
    "beta",
    "lhs_e3_dims",
    "build_complex",
    "cohomology",
    "module_ad",
    "module_sym",
    "module_trivial",
    "exp_group",
    "gamma_group",
    "log_bracket",
    "predicates",
    "uniform_tower_check",
    "LiftProblem",
    "brute_force_lift_oracle",
    "obstruction",
    "tower_extension_verdict",
    "ModMatrix",
    "PrimePower",
]
