"""Exact noncommutative polynomial algebra over 4x4 spin matrices."""

from .coeff import Coeff
from .model import (
    SymbolicModel,
    build_symbolic_model,
    canonical_system,
    central_relation,
    normalize,
    verify_central_relation,
    verify_supertranslation,
)
from .morphism import bd_morphism_check, bd_system
from .poly import (
    DerivativeCapExceeded,
    NCPolynomial,
    RewriteBudgetExceeded,
    RewriteError,
    RewriteSystem,
    format_polynomial,
    g_commutator,
)

__all__ = [
    "Coeff",
    "DerivativeCapExceeded",
    "NCPolynomial",
    "RewriteBudgetExceeded",
    "RewriteError",
    "RewriteSystem",
    "SymbolicModel",
    "bd_morphism_check",
    "bd_system",
    "build_symbolic_model",
    "canonical_system",
    "central_relation",
    "format_polynomial",
    "g_commutator",
    "normalize",
    "verify_central_relation",
    "verify_supertranslation",
]
