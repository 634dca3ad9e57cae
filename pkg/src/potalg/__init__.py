"""Rationally extended shape-invariant potentials.

Library surface: the (F, G, U) ladder-operator realization with its closure
constraints (``algebra``), closed-form potentials for the generalized
Poschl-Teller and PT-symmetric Scarf-II families (``potentials``), Jacobi
polynomials over complex arguments (``specialfun``), an independent
finite-difference eigensolver with grid refinement (``spectral``), the
superpotential / shape-invariance layer (``susy``), and a CLI (``cli``).
"""

__version__ = "0.1.0"

from .algebra import (AlgebraFunctions, BoundState, ResidualReport,
                      bound_state_labels, casimir_potential,
                      default_residual_grid, energy_closed_form,
                      make_algebra_functions, rest1_residuals, rest2_residual)
from .errors import (BoundStateRangeError, DomainError, NonConvergenceError,
                     ParameterError, PotalgError, SingularityError,
                     UsageError, WrongEngineError)
from .params import Family, PotentialParams, ValidationReport
from .potentials import (PotentialEvaluation, evaluate_potential,
                         potential_conventional, potential_rational,
                         potential_total, validate_params)
from .specialfun import JacobiParams, jacobi_poly, jacobi_poly_derivative
from .spectral import (GridSpec, Spectrum, TridiagonalOperator,
                       bound_states_from_spectrum, converge_spectrum,
                       discretize, discretize_function,
                       eigen_complex_tridiagonal, eigen_real_tridiagonal)
from .susy import (ShapeInvarianceReport, SuperpotentialEval,
                   energy_from_remainders, partner_pair,
                   shape_invariance_residual, superpotential)

__all__ = [
    "__version__",
    "AlgebraFunctions", "BoundState", "ResidualReport",
    "bound_state_labels", "casimir_potential", "default_residual_grid",
    "energy_closed_form", "make_algebra_functions", "rest1_residuals",
    "rest2_residual",
    "BoundStateRangeError", "DomainError", "NonConvergenceError",
    "ParameterError", "PotalgError", "SingularityError", "UsageError",
    "WrongEngineError",
    "Family", "PotentialParams", "ValidationReport",
    "PotentialEvaluation", "evaluate_potential", "potential_conventional",
    "potential_rational", "potential_total", "validate_params",
    "JacobiParams", "jacobi_poly", "jacobi_poly_derivative",
    "GridSpec", "Spectrum", "TridiagonalOperator",
    "bound_states_from_spectrum", "converge_spectrum", "discretize",
    "discretize_function", "eigen_complex_tridiagonal",
    "eigen_real_tridiagonal",
    "ShapeInvarianceReport", "SuperpotentialEval", "energy_from_remainders",
    "partner_pair", "shape_invariance_residual", "superpotential",
]
