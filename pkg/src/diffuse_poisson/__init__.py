"""Finite-difference Poisson solver for point charges in a diffuse dielectric.

The singular Coulomb part of the potential is removed analytically with the
Green's function of the inner medium; the smooth reaction-field remainder is
solved with a flux-form 7-point stencil and preconditioned CG. A trilinear
charge-spreading baseline and a 1D radial reference solution are included for
validation.
"""
from .charges import ChargeSet, PointCharge, load_charges
from .dielectric import ConstantDielectric, Dielectric, TanhSphericalDielectric
from .errors import ConfigError, GridMismatchError, SingularEvaluationError
from .experiment import (
    ExperimentConfig,
    compute_norms,
    oracle_field,
    oracle_profile,
    convergence_study,
    run_regularized,
    run_trilinear,
)
from .grid import Grid, ScalarField, make_grid, benchmark_grid
from .operator import assemble_regularized, assemble_trilinear, build_operator
from .radial import RadialProblem, sample_radial, solve_radial
from .solver import SolveReport, SolverConfig, solve

__all__ = [
    "ChargeSet", "PointCharge", "load_charges",
    "ConstantDielectric", "Dielectric", "TanhSphericalDielectric",
    "ConfigError", "GridMismatchError", "SingularEvaluationError",
    "ExperimentConfig", "compute_norms", "convergence_study", "oracle_field", "oracle_profile", "run_regularized", "run_trilinear",
    "Grid", "ScalarField", "make_grid", "benchmark_grid",
    "assemble_regularized", "assemble_trilinear", "build_operator",
    "RadialProblem", "sample_radial", "solve_radial",
    "SolveReport", "SolverConfig", "solve",
]
