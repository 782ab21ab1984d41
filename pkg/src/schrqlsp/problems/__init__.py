"""Test systems: finite-difference and P1 finite-element Poisson problems, BPX preconditioning."""
from .bpx import PreconditionedSystem, bpx, preconditioned_problem
from .fd import poisson1d_fd, poisson1d_manufactured
from .fem import (
    DiscreteSystem,
    ExactSolution,
    MANUFACTURED,
    fem_error_norms,
    poisson2d_manufactured,
    poisson2d_p1,
)
from .mesh import MeshHierarchy, MeshLevel, build_hierarchy

__all__ = [
    "DiscreteSystem",
    "ExactSolution",
    "MANUFACTURED",
    "MeshHierarchy",
    "MeshLevel",
    "PreconditionedSystem",
    "bpx",
    "build_hierarchy",
    "fem_error_norms",
    "poisson1d_fd",
    "poisson1d_manufactured",
    "poisson2d_manufactured",
    "poisson2d_p1",
    "preconditioned_problem",
]
