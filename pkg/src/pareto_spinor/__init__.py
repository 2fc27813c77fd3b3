"""Pareto critical sets, exact Pareto factorizations of 2x2 quadratic Hamiltonians,
graded normal forms and Bessel spinor solutions."""

from .algebra import ETA, TAU, XI, PolyMatrix2, Polynomial, QSqrt2
from .bessel import bessel_j
from .factorization import (
    FactorizationData, skew_conj, skew_diag_check, elasticity_factorization, verify_pareto_factorization,
)
from .hamiltonians import (
    ElasticityParams, GrapheneParams, elasticity_spatial, find_dirac_points, full_symbol,
    graphene_dispersion,
)
from .helmholtz import FieldGrid, SpinorField, eigenfields, residual_check, synthesize_spinor
from .normal_form import GradedCorrection, ObstructionError, homological_L, reconstruct, solve_graded
from .pareto import (
    ParetoLabel, QuadraticPair, classify_jacobian, direction_oracle, extract_strata, grid_scan,
    klein_bottle_utilities, quadratic_pareto_set,
)

__version__ = "0.1.0"

__all__ = [
    "ETA",
    "ElasticityParams",
    "FactorizationData",
    "FieldGrid",
    "GradedCorrection",
    "GrapheneParams",
    "ObstructionError",
    "ParetoLabel",
    "PolyMatrix2",
    "Polynomial",
    "QSqrt2",
    "QuadraticPair",
    "SpinorField",
    "TAU",
    "XI",
    "bessel_j",
    "classify_jacobian",
    "direction_oracle",
    "eigenfields",
    "elasticity_factorization",
    "elasticity_spatial",
    "extract_strata",
    "find_dirac_points",
    "full_symbol",
    "graphene_dispersion",
    "grid_scan",
    "homological_L",
    "klein_bottle_utilities",
    "quadratic_pareto_set",
    "reconstruct",
    "residual_check",
    "skew_conj",
    "skew_diag_check",
    "solve_graded",
    "synthesize_spinor",
    "verify_pareto_factorization",
]
