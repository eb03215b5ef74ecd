"""Complex Jacobi matrices, bilinear moment functionals and atomic measures on the plane."""

from .core import AtomicMeasure, MomentSequence, Polynomial, QQi, exact_sqrt, growth_radius
from .dilation import DilationModel, build_M, measure_moments, solve_moment_problem
from .errors import (
    Breakdown,
    ComplexJacobiError,
    NumericalFailure,
    ValidationError,
    WindowOverflow,
    ZeroOffDiagonal,
)
from .functional import BilinearFunctional, check_orthonormality, eval_S, eval_sigma
from .jacobi import JacobiSpec, compute_moments, generate_polynomials, norm_bound
from .reconstruct import SignRule, moments_to_jacobi, roundtrip_check
from .similarity import BasisMap, apply_T, check_intertwining, gram_matrix

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "BasisMap",
    "BilinearFunctional",
    "Breakdown",
    "ComplexJacobiError",
    "DilationModel",
    "JacobiSpec",
    "MomentSequence",
    "NumericalFailure",
    "Polynomial",
    "QQi",
    "SignRule",
    "ValidationError",
    "WindowOverflow",
    "ZeroOffDiagonal",
    "apply_T",
    "build_M",
    "check_intertwining",
    "check_orthonormality",
    "compute_moments",
    "eval_S",
    "eval_sigma",
    "exact_sqrt",
    "generate_polynomials",
    "gram_matrix",
    "growth_radius",
    "measure_moments",
    "moments_to_jacobi",
    "norm_bound",
    "roundtrip_check",
    "solve_moment_problem",
]
