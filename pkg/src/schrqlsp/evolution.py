"""Decoupled per-mode evolution of the auxiliary-variable system.

After the Fourier transform in p, mode l of the state evolves under
exp(i mu_l A t). Everything here is done in the eigenbasis of A, computed
once: A = V diag(lam) V^{-1}, with V unitary for Hermitian A. A diagonalizable
matrix with real spectrum (the BPX-preconditioned W = BA) is handled by the
same code through a non-unitary V.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .auxgrid import AuxGrid, forward_coeffs
from .errors import InvariantViolation, SingularMatrixError
from .kernels import KernelSpec, kernel_zeta

HERMITIAN_RTOL = 1e-12
SINGULAR_RTOL = 1e-14


@dataclass(frozen=True)
class Eigensystem:
    """A = vectors @ diag(values) @ inverse."""

    values: np.ndarray
    vectors: np.ndarray
    inverse: np.ndarray
    unitary: bool = True

    def to_eigenframe(self, v: np.ndarray) -> np.ndarray:
        """V^{-1} v; v is (N,) or (..., N) row-stacked."""
        return v @ self.inverse.T

    def from_eigenframe(self, v: np.ndarray) -> np.ndarray:
        return v @ self.vectors.T

    def function(self, fvals: np.ndarray) -> np.ndarray:
        """V diag(fvals) V^{-1} as a dense matrix."""
        return (self.vectors * fvals) @ self.inverse


def eig_hermitian(A) -> tuple[np.ndarray, np.ndarray]:
    """(U, lam) with A = U diag(lam) U^H, eigenvalues ascending."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    if np.linalg.norm(A - A.conj().T, 2) > HERMITIAN_RTOL * scale:
        raise InvariantViolation("matrix is not Hermitian")
    lam, U = np.linalg.eigh(A)
    return U, lam


@dataclass
class DiagonalizableProblem:
    """Linear system A x = b with a real-spectrum eigendecomposition of A.

    ``norm`` is the spectral 2-norm, ``kappa`` the 2-norm condition number and
    ``lam_abs_max`` the largest |eigenvalue| (equal to ``norm`` when A is Hermitian).
    """

    A: np.ndarray
    b: np.ndarray
    eig: Eigensystem
    norm: float
    kappa: float
    dilated: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @property
    def hermitian(self) -> bool:
        return self.eig.unitary

    @property
    def lam_abs_max(self) -> float:
        return float(np.max(np.abs(self.eig.values)))

    @property
    def lam_abs_min(self) -> float:
        return float(np.min(np.abs(self.eig.values)))

    @property
    def positive_definite(self) -> bool:
        return bool(np.min(self.eig.values) > 0)

    def direct_solution(self) -> np.ndarray:
        return np.linalg.solve(self.A, self.b)

    @classmethod
    def from_eigensystem(cls, A, b, eig: Eigensystem, **kw):
        A = np.asarray(A)
        b = np.asarray(b)
        _check_rhs(A, b)
        lam = np.abs(eig.values)
        if lam.min() <= SINGULAR_RTOL * lam.max():
            raise SingularMatrixError("matrix is singular to working precision")
        if eig.unitary:
            norm, kappa = float(lam.max()), float(lam.max() / lam.min())
        else:
            norm = float(np.linalg.norm(A, 2))
            kappa = float(np.linalg.cond(A, 2))
        return cls(A, b, eig, norm, kappa, **kw)


class HermitianProblem(DiagonalizableProblem):
    """Hermitian system; construct with :meth:`from_matrix`."""

    @classmethod
    def from_matrix(cls, A, b, dilated: bool = False, meta: dict | None = None) -> "HermitianProblem":
        A = np.asarray(A)
        if not np.iscomplexobj(A):
            A = A.astype(float)
        U, lam = eig_hermitian(A)
        eig = Eigensystem(lam, U, U.conj().T, unitary=True)
        return cls.from_eigensystem(A, b, eig, dilated=dilated, meta=meta or {})


def _check_rhs(A, b):
    if b.ndim != 1 or b.shape[0] != A.shape[0]:
        raise ValueError(f"right-hand side must have length {A.shape[0]}")
    if not np.any(b):
        raise ValueError("right-hand side must be nonzero")


@dataclass
class SchrodState:
    """Frequency-side state: row l holds the mode vector v~_l (shape N_p x N)."""

    grid: AuxGrid
    modes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.modes))

    def grid_values(self) -> np.ndarray:
        """(Phi (x) I) w~: row k is v_h(t, p_k)."""
        from .auxgrid import inverse_transform

        return inverse_transform(self.grid, self.modes)


def zeta_coeffs(grid: AuxGrid, spec: KernelSpec) -> np.ndarray:
    """zeta~ = Phi^{-1} zeta sampled on the grid."""
    vals = kernel_zeta(spec, grid.points)
    return forward_coeffs(grid, vals)


def initial_state(problem: DiagonalizableProblem, grid: AuxGrid, spec: KernelSpec) -> SchrodState:
    b = np.asarray(problem.b)
    if not np.any(b):
        raise ValueError("right-hand side must be nonzero")
    zt = zeta_coeffs(grid, spec)
    return SchrodState(grid, np.outer(zt, b))


def mode_phases(problem: DiagonalizableProblem, grid: AuxGrid, t: float) -> np.ndarray:
    """exp(i mu_l lam_j t) as an (N_p, N) array."""
    return np.exp(1j * t * np.multiply.outer(grid.frequencies, problem.eig.values))


def evolve(problem: DiagonalizableProblem, state: SchrodState, t: float) -> SchrodState:
    """w~(t) = exp(i (D_mu (x) A) t) w~(0), applied mode by mode as eigenbasis phases."""
    eig = problem.eig
    bar = eig.to_eigenframe(state.modes)
    bar = bar * mode_phases(problem, state.grid, t)
    return SchrodState(state.grid, eig.from_eigenframe(bar))


def time_integral_factor(omega, T: float):
    """sigma(omega, T) = int_0^T exp(i omega t) dt, stable as omega -> 0."""
    omega = np.asarray(omega, dtype=float)
    half = 0.5 * omega * T
    return T * np.exp(1j * half) * np.sinc(half / np.pi)


def mode_time_integral(problem: DiagonalizableProblem, grid: AuxGrid, l: int, T: float, v=None):
    """int_0^T exp(i mu_l A t) dt, exact in the eigenbasis.

    Returns the N x N operator, or its action on ``v`` when given.
    """
    sig = time_integral_factor(grid.frequencies[l] * problem.eig.values, T)
    eig = problem.eig
    if v is None:
        return eig.function(sig)
    return eig.vectors @ (sig * (eig.inverse @ np.asarray(v)))
