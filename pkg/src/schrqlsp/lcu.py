"""State-vector emulation of the LCU preparation of x_T^d and its resource figures.

Registers: ancilla (M = 2^a branches, one per quadrature node), p-mode (N_p),
system (N). The emulated chain is

    O_coef -> SEL (exp(i (D_mu (x) A) t_j) on branch j) -> O_coef^dagger -> Phi

followed by projection on ancilla 0 and on the grid point p = 0.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .auxgrid import AuxGrid, inverse_transform
from .errors import UnsupportedOperation
from .evolution import DiagonalizableProblem, zeta_coeffs
from .kernels import KernelSpec, kernel_zeta
from .solver import SolverParams, coefficient_nodes

MAX_EMULATION_DIM = 1 << 22


@dataclass
class LcuFigures:
    alpha_l1: float
    zeta_norm: float
    xi: float
    P_w: float
    P_x: float
    P_r: float
    g: float
    block_queries: float | None = None
    state_queries: float | None = None
    best_case: bool | None = None
    stage_norms: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


class QueryCounts(NamedTuple):
    block_queries: float
    state_queries: float
    best_case: bool
    linear_regime: float | None


def coefficient_vector(params: SolverParams) -> tuple[np.ndarray, float]:
    """Flattened positive weights c_{m,q} and their sum (= T)."""
    _, c = coefficient_nodes(params)
    return c, math.fsum(c)


def delta_from_eps(eps: float, xi: float) -> float:
    """delta = eps xi / log^{1/4}(1/(eps xi))."""
    y = eps * xi
    if not 0 < y < 1:
        raise ValueError("need 0 < eps * xi < 1")
    return y / math.log(1.0 / y) ** 0.25


def eps_from_delta(delta: float, xi: float) -> float:
    """Inverse of :func:`delta_from_eps` in eps (the map is increasing on (0, 1))."""
    if not (delta > 0 and xi > 0):
        raise ValueError("delta and xi must be positive")
    f = lambda y: y / math.log(1.0 / y) ** 0.25 - delta
    hi = 1.0 - 1e-15
    if f(hi) <= 0:
        raise ValueError("delta too large to invert")
    lo = min(delta, 0.5) * 1e-3
    while f(lo) > 0:
        lo *= 1e-3
    y = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    return y / xi


def query_complexity(kappa: float, normA: float, xi: float, eps: float, r: float = 2) -> QueryCounts:
    """Unit-constant query counts for preparing A^{-1}|b>/||.|| to accuracy eps.

    block = kappa^2/(xi ||A||) L^{1+1/r}, state = kappa/(xi ||A||) L^{(1+1/r)/2},
    L = log(kappa/(xi ||A|| eps)). ``best_case`` flags xi ||A|| >= kappa/2, where
    the cost is nearly linear: kappa log^{1.5}(1/eps).
    """
    for name, v in (("kappa", kappa), ("normA", normA), ("xi", xi), ("eps", eps), ("r", r)):
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be positive and finite")
    if eps >= 1:
        raise ValueError("eps must be < 1")
    s = xi * normA
    if s > kappa * (1 + 1e-9):
        raise ValueError("xi * ||A|| cannot exceed kappa")
    s = min(s, kappa)
    lg = math.log(kappa / (s * eps))
    p = 1.0 + 1.0 / r
    block = kappa ** 2 / s * lg ** p
    state = kappa / s * lg ** (p / 2)
    best = s >= kappa / 2
    linear = kappa * math.log(1.0 / eps) ** 1.5 if best else None
    return QueryCounts(block, state, best, linear)


def _zeta_grid_norm(grid: AuxGrid, spec) -> float:
    return float(np.linalg.norm(kernel_zeta(KernelSpec.from_token(spec), grid.points)))


def _queries(problem, params, xi):
    try:
        eps = eps_from_delta(params.delta, xi)
        if eps >= 1:
            return None
        return query_complexity(problem.kappa, problem.norm, xi, eps)
    except ValueError:
        return None


def figures_from_solve(problem: DiagonalizableProblem, grid: AuxGrid, spec, params: SolverParams,
                       x, w_int_norm: float, exact_x=None) -> LcuFigures:
    """Closed-form success probabilities given x_T^d and ||p(A) w~_h(0)||."""
    _, l1 = coefficient_vector(params)
    zn = _zeta_grid_norm(grid, spec)
    b = np.asarray(problem.b)
    bn = float(np.linalg.norm(b))
    xn = float(np.linalg.norm(x))
    w0 = zn * bn
    P_r = (xn / (l1 * w0)) ** 2
    P_w = (w_int_norm * math.sqrt(grid.N_p) / (l1 * w0)) ** 2
    P_x = P_r / P_w if P_w > 0 else 0.0
    g = l1 * w0 / xn if xn > 0 else math.inf
    if exact_x is not None and exact_x.shape[0] != problem.N:
        exact_x = None
    if exact_x is None:
        exact_x = np.linalg.solve(problem.A, b)
    xi = float(np.linalg.norm(exact_x) / bn)
    q = _queries(problem, params, xi)
    return LcuFigures(
        alpha_l1=l1, zeta_norm=zn, xi=xi, P_w=P_w, P_x=P_x, P_r=P_r, g=g,
        block_queries=None if q is None else q.block_queries,
        state_queries=None if q is None else q.state_queries,
        best_case=None if q is None else q.best_case,
    )


def _householder(a: np.ndarray):
    """Reflector H with H e_0 = a (a real, unit norm); H is its own inverse."""
    v = -a.copy()
    v[0] += 1.0
    vv = float(v @ v)

    def apply(psi):
        if vv < 1e-30:
            return psi
        return psi - (2.0 / vv) * np.multiply.outer(v, np.tensordot(v, psi, axes=(0, 0)))

    return apply


def emulate_pipeline(problem: DiagonalizableProblem, grid: AuxGrid, spec, params: SolverParams):
    """Run the LCU chain on explicit vectors.

    Returns (state, figures): ``state`` is the normalized post-selected system
    vector, proportional to x_T^d.
    """
    if not problem.hermitian:
        raise UnsupportedOperation("emulation needs a unitary evolution (Hermitian A)")
    k0 = grid.require_zero()
    t, alpha = coefficient_nodes(params)
    l1 = math.fsum(alpha)
    M = 1 << max(0, math.ceil(math.log2(alpha.size)))
    N = problem.N
    dim = M * grid.N_p * N
    if dim > MAX_EMULATION_DIM:
        raise ValueError(f"emulation dimension {dim} exceeds {MAX_EMULATION_DIM}")
    a = np.zeros(M)
    a[:alpha.size] = np.sqrt(alpha / l1)
    oc = _householder(a)
    eig = problem.eig
    norms = []

    # O_w: |w_h(0)> normalized, carried to the unitary Fourier side
    zg = kernel_zeta(KernelSpec.from_token(spec), grid.points)
    b = np.asarray(problem.b, dtype=complex)
    wh = np.outer(zg, b)
    wh_norm = float(np.linalg.norm(wh))
    wt_unit = math.sqrt(grid.N_p) * zeta_coeffs(grid, spec)[:, None] * b[None, :] / wh_norm
    psi = np.zeros((M, grid.N_p, N), dtype=complex)
    psi[0] = wt_unit
    norms.append(float(np.linalg.norm(psi)))
    psi = oc(psi)
    norms.append(float(np.linalg.norm(psi)))
    # SEL: branch j evolves to t_j, in the eigenframe of A
    bar = eig.to_eigenframe(psi[:alpha.size])
    phase = np.exp(1j * t[:, None, None] * np.multiply.outer(grid.frequencies, eig.values)[None])
    psi[:alpha.size] = eig.from_eigenframe(bar * phase)
    norms.append(float(np.linalg.norm(psi)))
    psi = oc(psi)
    norms.append(float(np.linalg.norm(psi)))
    # unitary Fourier synthesis Phi / sqrt(N_p) on every branch
    psi = inverse_transform(grid, np.moveaxis(psi, 1, 0)) / math.sqrt(grid.N_p)
    psi = np.moveaxis(psi, 0, 1)
    norms.append(float(np.linalg.norm(psi)))

    anc0 = psi[0]
    P_w = float(np.vdot(anc0, anc0).real)
    star = anc0[k0]
    P_r = float(np.vdot(star, star).real)
    P_x = P_r / P_w if P_w > 0 else 0.0
    state = star / math.sqrt(P_r)
    x_exact = np.linalg.solve(problem.A, b)
    xi = float(np.linalg.norm(x_exact) / np.linalg.norm(b))
    q = _queries(problem, params, xi)
    figs = LcuFigures(
        alpha_l1=l1, zeta_norm=float(np.linalg.norm(zg)), xi=xi, P_w=P_w, P_x=P_x, P_r=P_r,
        g=1.0 / math.sqrt(P_r),
        block_queries=None if q is None else q.block_queries,
        state_queries=None if q is None else q.state_queries,
        best_case=None if q is None else q.best_case,
        stage_norms=norms,
    )
    return state, figs
