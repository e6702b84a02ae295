"""Z2^2-graded supersymmetric quantum mechanics.

Exact verification of the graded algebra realized by the model operators,
and finite-difference reproduction of its spectrum and degeneracies.
"""

from .assembly import GridSpec, build_ladder, build_model, residual_report
from .graded_matrix import GradedMatrix, alpha, bracket_table, sigma, standard_basis, verify_z22_lie
from .grading import Degree, bracket_sign, scalar_product
from .potential import PotentialExpr, check_confinement, differentiate, eval_potential, parse
from .spectral import (
    build_multiplet,
    check_degeneracies,
    cluster_levels,
    eigensolve,
    positivity_check,
    spectrum,
    zero_mode_analysis,
)

__version__ = "0.1.0"

__all__ = [
    "Degree",
    "GradedMatrix",
    "GridSpec",
    "PotentialExpr",
    "alpha",
    "bracket_sign",
    "bracket_table",
    "build_ladder",
    "build_model",
    "build_multiplet",
    "check_confinement",
    "check_degeneracies",
    "cluster_levels",
    "differentiate",
    "eigensolve",
    "eval_potential",
    "parse",
    "positivity_check",
    "residual_report",
    "scalar_product",
    "sigma",
    "spectrum",
    "standard_basis",
    "verify_z22_lie",
    "zero_mode_analysis",
]
