"""Expose the public interface of the Galerkin blow-up package.

The package implements continuous (cG) and discontinuous (dG) Galerkin time
stepping of arbitrary polynomial degree for nonlinear initial value problems in
``R^N``, the discrete dG time derivative and its inverse, and the norm-adapted
step selection that approximates finite blow-up times. A companion
command-line interface, ``galerkin-blowup``, runs single solves, blow-up
estimates and convergence studies.

"""

from __future__ import annotations

from .blowup import (
    BlowupResult,
    Diagnostics,
    GrowthBoundWarning,
    GrowthHypothesisError,
    GrowthParams,
    StepPlan,
    blowup_run,
    psi,
    psi_root,
    rho_max,
    step_size,
)
from .dg_operators import ChiOperator, chi_apply, chi_build, chi_solve, lifting
from .legendre import IntervalMap, QuadRule, gauss_rule, legendre_eval
from .poly_traj import PolyTraj, project_l2, sup_norm
from .problems import Problem, build_problem, clip_radial, example_blowup, linear_test, power_law
from .stepping import (
    BallContainmentWarning,
    NonConvergenceError,
    SolverConfig,
    StepResult,
    Trajectory,
    cg_step,
    dg_step,
    solve_mesh,
)
from .sweep import ConvergenceStudy, StudyResult

__all__ = [
    "BallContainmentWarning",
    "BlowupResult",
    "ChiOperator",
    "ConvergenceStudy",
    "Diagnostics",
    "GrowthBoundWarning",
    "GrowthHypothesisError",
    "GrowthParams",
    "IntervalMap",
    "NonConvergenceError",
    "PolyTraj",
    "Problem",
    "QuadRule",
    "SolverConfig",
    "StepPlan",
    "StepResult",
    "StudyResult",
    "Trajectory",
    "blowup_run",
    "build_problem",
    "cg_step",
    "chi_apply",
    "chi_build",
    "chi_solve",
    "clip_radial",
    "dg_step",
    "example_blowup",
    "gauss_rule",
    "legendre_eval",
    "lifting",
    "linear_test",
    "power_law",
    "project_l2",
    "psi",
    "psi_root",
    "rho_max",
    "solve_mesh",
    "step_size",
    "sup_norm",
]
