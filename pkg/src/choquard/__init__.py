"""Radial solver for the concave-convex Choquard equation.

Computes the extremal parameters of the nonlinear Rayleigh quotients, the two
positive Nehari-branch solutions and their continuation in the concave
parameter, on a truncated radial grid.
"""

from .errors import (ChoquardError, ConfigError, DomainError, GridMismatchError,
                     NoRootsError, NonConvergenceError, ZeroFieldError)
from .fibering import BranchTag
from .functional import FiberCoefficients, ProblemParams
from .grid import Field, PotentialSpec, RadialGrid, build_grid
from .riesz import RieszOperator, make_riesz

__all__ = [
    "BranchTag", "ChoquardError", "ConfigError", "DomainError", "Field",
    "FiberCoefficients", "GridMismatchError", "NoRootsError",
    "NonConvergenceError", "PotentialSpec", "ProblemParams", "RadialGrid",
    "RieszOperator", "ZeroFieldError", "build_grid", "make_riesz",
]

__version__ = "0.1.0"
