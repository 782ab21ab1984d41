"""Classical emulator of a Schroedingerization-form quantum linear-systems solver.

A^{-1} b is recovered from the p = 0 slice of the convection system
dv/dt = A dv/dp, v(0, p) = zeta(p) b, integrated over t in [0, T]. The
auxiliary variable p is discretized spectrally and each Fourier mode evolves
independently in the eigenbasis of A.
"""
from .auxgrid import AuxGrid, build_grid, grid_with_zero, symmetric_grid
from .errors import (
    GridError,
    InputError,
    InvariantViolation,
    NumericalError,
    SchrqlspError,
    SingularMatrixError,
    UnsupportedOperation,
)
from .evolution import DiagonalizableProblem, HermitianProblem
from .kernels import EXP_ABS, FOURIER_ODD, GAUSSIAN, KernelSpec, KernelVariant
from .lcu import LcuFigures, coefficient_vector, emulate_pipeline, query_complexity
from .solver import (
    SolveReport,
    SolverParams,
    dilate,
    gauss_rule,
    integrate_slice,
    select_params,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AuxGrid",
    "DiagonalizableProblem",
    "EXP_ABS",
    "FOURIER_ODD",
    "GAUSSIAN",
    "GridError",
    "HermitianProblem",
    "InputError",
    "InvariantViolation",
    "KernelSpec",
    "KernelVariant",
    "LcuFigures",
    "NumericalError",
    "SchrqlspError",
    "SingularMatrixError",
    "SolveReport",
    "SolverParams",
    "UnsupportedOperation",
    "build_grid",
    "coefficient_vector",
    "dilate",
    "emulate_pipeline",
    "gauss_rule",
    "grid_with_zero",
    "integrate_slice",
    "query_complexity",
    "select_params",
    "solve",
    "symmetric_grid",
]
