"""BPX multilevel preconditioner and the preconditioned system W = BA.

W is not symmetric but is similar to the SPD matrix S = L^T A L with
B = L L^T, so its eigenvectors are V = L Q where S = Q diag(lam) Q^T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from ..errors import InvariantViolation
from ..evolution import DiagonalizableProblem, Eigensystem
from ..kernels import EXP_ABS, KernelSpec
from .mesh import MeshHierarchy
from .system import DiscreteSystem


def bpx(hier: MeshHierarchy, top: int | None = None) -> np.ndarray:
    """B = sum_j I_j I_j^T over levels 0..top (default J); h-weights are 1 in 2-D."""
    top = hier.J if top is None else top
    n = hier.levels[top].n_interior
    B = np.zeros((n, n))
    for j in range(top + 1):
        Ij = hier.chain(j, top)
        B += (Ij @ Ij.T).toarray()
    return B


@dataclass
class PreconditionedSystem:
    problem: DiagonalizableProblem
    kappa_plus: float
    kappa_minus: float
    kappa_W: float
    lam_min: float
    lam_max: float
    L: float
    R: float
    eps: float
    multiplier: float
    L_formula: float = 0.0
    R_formula: float = 0.0
    kernel: KernelSpec = EXP_ABS

    @property
    def W(self) -> np.ndarray:
        return self.problem.A

    @property
    def c(self) -> np.ndarray:
        return self.problem.b


def _check_spd(M, name):
    if np.max(np.abs(M - M.T)) > 1e-12 * np.max(np.abs(M)):
        raise InvariantViolation(f"{name} is not symmetric")
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        raise InvariantViolation(f"{name} is not positive definite") from None


def preconditioned_problem(sys: DiscreteSystem, B, eps: float = 1e-3, multiplier: float = 1.0,
                           T: float | None = None) -> PreconditionedSystem:
    """W = BA, c = Bb, the spectral figures kappa^{+-} and the p-domain [-L, R].

    R = c (kappa^- log(kappa(W)/eps) + log(1/eps) + 1/2) and L likewise with kappa^+.
    With an evolution time ``T`` the domain is widened, if needed, so that the
    profile exp(-|p|) transported by lam_max(W) T stays inside:
    L >= lam_max T + log(1/eps) and R >= log(1/eps).
    """
    A = np.asarray(sys.A, dtype=float)
    B = np.asarray(B, dtype=float)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    _check_spd(A, "A")
    Lc = _check_spd(B, "B")
    S = Lc.T @ A @ Lc
    S = 0.5 * (S + S.T)
    lam, Q = np.linalg.eigh(S)
    V = Lc @ Q
    Vinv = Q.T @ sla.solve_triangular(Lc, np.eye(Lc.shape[0]), lower=True)
    W = B @ A
    c = B @ sys.b
    eig = Eigensystem(lam, V, Vinv, unitary=False)
    prob = DiagonalizableProblem.from_eigensystem(W, c, eig, meta={"B": B, "system": sys})
    sym = np.linalg.eigvalsh(W + W.T)
    lam_min = float(lam[0])
    pos = max(float(sym[-1]), 0.0)
    neg = max(float(-sym[0]), 0.0)
    kp = pos / (2.0 * lam_min)
    km = neg / (2.0 * lam_min)
    kW = prob.kappa
    lg = math.log(kW / eps)
    R = multiplier * (km * lg + math.log(1.0 / eps) + 0.5)
    L = multiplier * (kp * lg + math.log(1.0 / eps) + 0.5)
    L0, R0 = L, R
    if T is not None:
        tail = math.log(1.0 / eps)
        L = max(L, float(lam[-1]) * T + tail)
        R = max(R, tail)
    return PreconditionedSystem(prob, kp, km, kW, lam_min, float(lam[-1]), L, R, eps, multiplier, L0, R0)
