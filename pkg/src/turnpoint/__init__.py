"""Hybrid finite differences on Shishkin meshes for turning-point problems."""

from .analysis import (ConvergenceReport, ErrorGridEntry, double_mesh_error, max_pointwise_error,
                       observed_order, run_convergence, solve_problem)
from .mesh import MeshConfig, ShishkinMesh, build_mesh
from .problem import ProblemSpec, Violation, erf, example1, example2, validate
from .scheme import (StencilKind, StencilRow, TridiagonalSystem, assemble, assemble_upwind,
                     check_assumptions, classify)
from .solver import DiscreteSolution, SingularSystemError, residual, solve

__all__ = [
    "ConvergenceReport", "DiscreteSolution", "ErrorGridEntry", "MeshConfig", "ProblemSpec",
    "ShishkinMesh", "SingularSystemError", "StencilKind", "StencilRow", "TridiagonalSystem",
    "Violation", "assemble", "assemble_upwind", "build_mesh", "check_assumptions", "classify",
    "double_mesh_error", "erf", "example1", "example2", "max_pointwise_error", "observed_order",
    "residual", "run_convergence", "solve", "solve_problem", "validate",
]
