"""Pareto curve approximation for bicriteria polynomial programs.

The package scalarizes a two-criteria polynomial problem into a parametric
program, solves a single truncated moment relaxation of it, and recovers
the Pareto curve either as a pair of univariate density estimates or as a
certified polynomial underestimator.  A FastAPI service wraps the library;
the command-line tool is a thin client of that service.
"""

from .polynomial import Basis, Monomial, Polynomial, basis_size, enumerate_basis
from .scalarize import (
    BicriteriaProblem,
    ChebyshevScaling,
    DegenerateTradeoff,
    ParametricPOP,
    SublevelBounds,
    build_method_a,
    build_method_b,
    build_method_c,
    criterion_bounds,
)
from .relax import MomentSDP, PSDBlock, assemble, assemble_pop, min_order
from .sdpsolve import (
    InfeasibleRelaxation,
    SDPSolution,
    SolverFailure,
    SolverOptions,
    Status,
    extract_dual_polynomial,
    solve,
)
from .densrec import (
    DensityEstimate,
    MomentVector,
    hankel_matrix,
    parametric_curve,
    recover_density,
)
from .pipeline import (
    DiscretizationRow,
    DiscretizationTable,
    ParetoRun,
    discretize,
    extract_generalized_moments,
    run_method_ab,
    run_method_c,
)
from .problemio import ProblemFile, example1, example2, load_problem, parse_problem, random_quadratic

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "BicriteriaProblem",
    "ChebyshevScaling",
    "DegenerateTradeoff",
    "DensityEstimate",
    "DiscretizationRow",
    "DiscretizationTable",
    "InfeasibleRelaxation",
    "Monomial",
    "MomentSDP",
    "MomentVector",
    "ParametricPOP",
    "ParetoRun",
    "Polynomial",
    "ProblemFile",
    "PSDBlock",
    "SDPSolution",
    "SolverFailure",
    "SolverOptions",
    "Status",
    "SublevelBounds",
    "assemble",
    "assemble_pop",
    "basis_size",
    "build_method_a",
    "build_method_b",
    "build_method_c",
    "criterion_bounds",
    "discretize",
    "enumerate_basis",
    "example1",
    "example2",
    "extract_dual_polynomial",
    "extract_generalized_moments",
    "hankel_matrix",
    "load_problem",
    "min_order",
    "parametric_curve",
    "parse_problem",
    "random_quadratic",
    "recover_density",
    "run_method_ab",
    "run_method_c",
    "solve",
]
