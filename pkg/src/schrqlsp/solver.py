"""End-to-end solve: parameter selection, time quadrature of the p = 0 slice, oracles.

The approximate solution is

    x_T^d = sum_l exp(-i mu_l a) V [ S(mu_l lam) * (zeta~_l V^{-1} b) ]

where ``S(omega) = sum_{m,q} c_{m,q} exp(i omega t_{m,q})`` is the composite
Gauss-Legendre rule applied to exp(i omega t) on [0, T]. The exact-integral
variant replaces S by (exp(i omega T) - 1) / (i omega).
"""
from __future__ import annotations

import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from . import auxgrid
from .auxgrid import AuxGrid
from .errors import InvariantViolation, SingularMatrixError, UnsupportedOperation
from .evolution import (
    DiagonalizableProblem,
    HermitianProblem,
    time_integral_factor,
    zeta_coeffs,
)
from .kernels import KernelSpec, KernelVariant, kernel_eta, kernel_seminorm, kernel_tail_radius

log = logging.getLogger(__name__)

MAX_GAUSS_NODES = 64
ORACLE_MAX_N = 1 << 12
# complex entries per chunk of the (modes x eigenvalues x nodes) quadrature sum
_CHUNK_ENTRIES = 1 << 22


# --- dilation --------------------------------------------------------------

def dilate(A, b) -> HermitianProblem:
    """Hermitian embedding [[0, A], [A^H, 0]] [y; x] = [b; 0]; the solution is y = 0."""
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    n = A.shape[0]
    dtype = np.result_type(A, b, float)
    At = np.zeros((2 * n, 2 * n), dtype=dtype)
    At[:n, n:] = A
    At[n:, :n] = A.conj().T
    bt = np.concatenate([b.astype(dtype), np.zeros(n, dtype=dtype)])
    return HermitianProblem.from_matrix(At, bt, dilated=True, meta={"A": A, "b": b})


# --- parameters ------------------------------------------------------------

@dataclass
class SolverParams:
    """Discretization parameters.

    The p-domain is [-pi R, pi R] when ``L`` is None, otherwise [-L, R].
    """

    delta: float
    T: float
    N_t: int
    tau: float
    Q: int
    R: float
    n_p: int
    m: int
    L: float | None = None
    kernel: str = KernelVariant.FOURIER_ODD.value
    multiplier: float = 1.0
    violations: list = field(default_factory=list)

    @property
    def N_p(self) -> int:
        return 1 << self.n_p

    def grid(self) -> AuxGrid:
        if self.L is None:
            return auxgrid.symmetric_grid(self.R, self.n_p)
        return auxgrid.grid_with_zero(self.L, self.R, self.n_p)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["N_p"] = self.N_p
        return d


def _time_horizon(spec: KernelSpec, kappa: float, norm: float, delta: float) -> float:
    ratio = kappa / norm
    arg = math.log(2.0 * ratio / delta)
    if spec.variant is KernelVariant.EXP_ABS:
        return ratio * arg
    return ratio * math.sqrt(2.0 * arg)


def _smoothness_order(spec: KernelSpec, T: float, delta: float) -> int:
    if not spec.smooth:
        return 1
    loglog = math.log(math.log(1.0 / delta)) if delta < 1.0 / math.e else 0.0
    if loglog <= 0.0:
        return 2
    return max(2, math.ceil(2.0 * math.log(T / delta) / loglog))


def _seminorm(spec: KernelSpec, m: int, a: float, b: float) -> float:
    if not spec.smooth:
        # weak derivative -sign(p) exp(-|p|) has unit L2 norm on the real line
        return 1.0
    return kernel_seminorm(spec, m, a, b)


def _domain_ends(params: SolverParams) -> tuple[float, float]:
    if params.L is None:
        return -math.pi * params.R, math.pi * params.R
    return -params.L, params.R


def gauss_rule(Q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    if not 1 <= int(Q) <= MAX_GAUSS_NODES:
        raise ValueError(f"Q must lie in [1, {MAX_GAUSS_NODES}]")
    x, w = np.polynomial.legendre.leggauss(int(Q))
    return 0.5 * (x + 1.0), 0.5 * w


def check_params(problem: DiagonalizableProblem, spec: KernelSpec, params: SolverParams) -> list[str]:
    """Return the list of violated invariants (empty when all hold)."""
    out = []
    if not 0.0 < params.delta < 1.0:
        out.append(f"delta={params.delta} outside (0, 1)")
    if params.Q < 1:
        out.append("Q must be >= 1")
    if params.N_t < 1 or params.N_t != math.ceil(params.T / params.tau - 1e-9):
        out.append(f"N_t={params.N_t} inconsistent with ceil(T/tau)")
    grid = params.grid()
    step = params.tau * auxgrid.momentum_norm(grid) * problem.norm
    if step > 1.0 + 1e-12:
        out.append(f"tau*||D_mu||*||A|| = {step:.4g} > 1")
    lam = problem.eig.values
    left_reach = max(float(lam.max()), 0.0) * params.T
    right_reach = max(float(-lam.min()), 0.0) * params.T
    m_tail = min(params.m, 1) if not spec.smooth else params.m
    tail = kernel_tail_radius(spec, m_tail, params.delta) if 0 < params.delta < 1 else 0.0
    slack = 1e-9 * (abs(grid.a) + abs(grid.b))
    if -grid.a + slack < left_reach + tail or grid.b + slack < right_reach + tail:
        out.append(
            f"p-domain [{grid.a:.4g}, {grid.b:.4g}] does not contain the transported profile "
            f"(needs [-{left_reach + tail:.4g}, {right_reach + tail:.4g}])"
        )
    return out


def select_params(
    problem: DiagonalizableProblem,
    spec,
    delta: float,
    overrides: dict | None = None,
    strict: bool = True,
) -> SolverParams:
    """Choose T, m, R, N_p, tau, Q from the error analysis; ``overrides`` replace any of them.

    Recognised override keys: T, R, L, n_p, Q, tau, m, multiplier. With
    ``strict`` an invariant violation raises; otherwise it is recorded in
    ``params.violations``.
    """
    spec = KernelSpec.from_token(spec)
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    ov = {k: v for k, v in (overrides or {}).items() if v is not None}
    unknown = set(ov) - {"T", "R", "L", "n_p", "Q", "tau", "m", "multiplier"}
    if unknown:
        raise ValueError(f"unknown override(s): {sorted(unknown)}")
    if problem.lam_abs_min <= 0:
        raise SingularMatrixError("matrix is singular")

    T = float(ov.get("T", _time_horizon(spec, problem.kappa, problem.norm, delta)))
    if not T > 0:
        raise ValueError("T must be positive")
    m = int(ov.get("m", _smoothness_order(spec, T, delta)))
    L = ov.get("L")
    m_tail = m if spec.smooth else min(m, 1)
    tail = kernel_tail_radius(spec, m_tail, delta)
    lam = problem.eig.values
    if "R" in ov:
        R = float(ov["R"])
    elif L is None:
        R = (problem.lam_abs_max * T + tail) / math.pi
    else:
        R = max(float(-lam.min()), 0.0) * T + tail
    if "n_p" in ov:
        n_p = int(ov["n_p"])
    else:
        width = 2.0 * math.pi * R if L is None else float(L) + R
        a = -math.pi * R if L is None else -float(L)
        b = a + width
        if spec.smooth:
            semi = kernel_seminorm(spec, m, a, b)
            target = width * semi ** (1.0 / m) * math.sqrt(math.log(1.0 / delta))
        else:
            # a kink gives second-order grid error, about dp^2 / 6
            target = width / math.sqrt(6.0 * delta)
        n_p = max(1, math.ceil(math.log2(max(target, 2.0))))
        if n_p > auxgrid.MAX_LOG2_POINTS:
            raise InvariantViolation(f"required grid 2^{n_p} exceeds 2^{auxgrid.MAX_LOG2_POINTS}")
    params = SolverParams(
        delta=delta, T=T, N_t=1, tau=T, Q=1, R=R, n_p=n_p, m=m,
        L=None if L is None else float(L), kernel=spec.token,
        multiplier=float(ov.get("multiplier", 1.0)),
    )
    grid = params.grid()
    tau = float(ov.get("tau", 1.0 / (auxgrid.momentum_norm(grid) * problem.norm)))
    N_t = max(1, math.ceil(T / tau - 1e-9))
    params.N_t = N_t
    params.tau = T / N_t
    params.Q = int(ov.get("Q", max(2, math.ceil(math.log(T / delta)))))
    if params.Q > MAX_GAUSS_NODES:
        params.Q = MAX_GAUSS_NODES
    params.violations = check_params(problem, spec, params)
    if params.violations:
        if strict:
            raise InvariantViolation("; ".join(params.violations))
        for v in params.violations:
            log.warning("parameter invariant violated: %s", v)
    return params


# --- quadrature ------------------------------------------------------------

def coefficient_nodes(params: SolverParams) -> tuple[np.ndarray, np.ndarray]:
    """Flattened (t_{m,q}, c_{m,q}), interval-major."""
    x, w = gauss_rule(params.Q)
    starts = params.tau * np.arange(params.N_t)
    t = (starts[:, None] + params.tau * x[None, :]).ravel()
    c = np.broadcast_to(params.tau * w, (params.N_t, params.Q)).ravel().copy()
    return t, c


def _geometric(theta: np.ndarray, n: int) -> np.ndarray:
    """sum_{m<n} exp(i m theta) = exp(i (n-1) theta/2) sin(n theta/2) / sin(theta/2)."""
    s = np.sin(0.5 * theta)
    small = np.abs(s) < 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(small, n, np.sin(0.5 * n * theta) / np.where(small, 1.0, s))
    return np.exp(0.5j * (n - 1) * theta) * ratio


def _weights_block(mu, lam, params: SolverParams, exact: bool, method: str) -> np.ndarray:
    """S(mu_l lam_j) for a block of modes: shape (len(mu), len(lam))."""
    omega = np.multiply.outer(mu, lam)
    if exact:
        return time_integral_factor(omega, params.T)
    if method == "factored":
        x, w = gauss_rule(params.Q)
        theta = omega * params.tau
        local = np.exp(1j * theta[..., None] * x) @ w
        return params.tau * local * _geometric(theta, params.N_t)
    if method == "nodes":
        t, c = coefficient_nodes(params)
        out = np.zeros(omega.shape, dtype=complex)
        step = max(1, _CHUNK_ENTRIES // max(omega.size, 1))
        for i in range(0, t.size, step):
            out += np.exp(1j * omega[..., None] * t[i:i + step]) @ c[i:i + step]
        return out
    raise ValueError(f"unknown quadrature method {method!r}")


def _mode_blocks(grid: AuxGrid, n_eig: int, Q: int):
    per = max(1, _CHUNK_ENTRIES // max(n_eig * Q, 1))
    for start in range(0, grid.N_p, per):
        yield slice(start, min(grid.N_p, start + per))


def slice_and_modes(
    problem: DiagonalizableProblem,
    grid: AuxGrid,
    spec,
    params: SolverParams,
    exact: bool = False,
    method: str = "factored",
    want_norm: bool = False,
):
    """(x_T^d, ||p(A) w~_h(0)||) with the norm only when ``want_norm``."""
    spec = KernelSpec.from_token(spec)
    k0 = grid.require_zero()
    eig = problem.eig
    zt = zeta_coeffs(grid, spec)
    bbar = eig.to_eigenframe(np.asarray(problem.b, dtype=complex))
    readout = np.exp(-1j * grid.frequencies * grid.a)
    acc = np.zeros(problem.N, dtype=complex)
    sq = 0.0
    for blk in _mode_blocks(grid, problem.N, 1 if exact else params.Q):
        S = _weights_block(grid.frequencies[blk], eig.values, params, exact, method)
        acc += (readout[blk] * zt[blk]) @ S
        if want_norm:
            modes = S * np.outer(zt[blk], bbar)
            if eig.unitary:
                sq += float(np.vdot(modes, modes).real)
            else:
                full = eig.from_eigenframe(modes)
                sq += float(np.vdot(full, full).real)
    del k0
    x = eig.vectors @ (acc * bbar)
    return x, (math.sqrt(sq) if want_norm else None)


def integrate_slice(problem, grid, spec, params, exact: bool = False, method: str = "factored"):
    """x_T^d: composite Gauss quadrature (or exact integral) of v_h(t, 0) over [0, T]."""
    return slice_and_modes(problem, grid, spec, params, exact=exact, method=method)[0]


# --- solve -----------------------------------------------------------------

@dataclass
class SolveReport:
    x: np.ndarray
    residual: float
    oracle_gap: float | None
    params: SolverParams
    lcu: object = None
    timings: dict = field(default_factory=dict)
    x_full: np.ndarray | None = None

    def to_dict(self, timings: bool = True) -> dict:
        x = np.asarray(self.x, dtype=complex)
        out = {
            "x_re": x.real.tolist(),
            "x_im": x.imag.tolist(),
            "residual": self.residual,
            "oracle_gap": self.oracle_gap,
            "params": self.params.to_dict(),
            "lcu": self.lcu.to_dict() if self.lcu is not None else None,
        }
        if timings:
            out["timings"] = dict(self.timings)
        return out


def _as_problem(A, b, dilate_flag):
    if isinstance(A, DiagonalizableProblem):
        if b is not None:
            raise ValueError("pass either a problem or (A, b), not both")
        return A
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    hermitian = np.linalg.norm(A - A.conj().T, 2) <= 1e-12 * scale
    if dilate_flag or (dilate_flag is None and not hermitian):
        return dilate(A, b)
    return HermitianProblem.from_matrix(A, b)


def solve(
    A,
    b=None,
    delta: float = 1e-6,
    *,
    kernel="fourier-odd",
    overrides: dict | None = None,
    exact_integral: bool = False,
    dilate: bool | None = None,
    strict: bool = True,
    method: str = "factored",
    compute_lcu: bool = True,
) -> SolveReport:
    """Solve A x = b through the auxiliary-variable convection system.

    ``A`` may also be a prepared :class:`DiagonalizableProblem` (then ``b`` is None).
    Non-Hermitian matrices are dilated unless ``dilate=False``.
    """
    t0 = time.perf_counter()
    spec = KernelSpec.from_token(kernel)
    problem = _as_problem(A, b, dilate)
    if spec.requires_positive_spectrum and not problem.positive_definite:
        raise InvariantViolation(f"kernel {spec.token} needs a positive spectrum")
    t1 = time.perf_counter()
    params = select_params(problem, spec, delta, overrides, strict=strict)
    grid = params.grid()
    t2 = time.perf_counter()
    x_full, w_int_norm = slice_and_modes(
        problem, grid, spec, params, exact=exact_integral, method=method, want_norm=compute_lcu
    )
    t3 = time.perf_counter()

    if problem.dilated:
        A0, b0 = problem.meta["A"], problem.meta["b"]
        x = x_full[problem.N // 2:]
    else:
        A0, b0 = problem.A, problem.b
        x = x_full
    bnorm = float(np.linalg.norm(b0))
    residual = float(np.linalg.norm(A0 @ x - b0) / bnorm)
    gap = None
    exact_x = None
    if A0.shape[0] <= ORACLE_MAX_N:
        exact_x = np.linalg.solve(A0, b0)
        gap = float(np.linalg.norm(x - exact_x) / bnorm)
    lcu_figs = None
    if compute_lcu:
        from .lcu import figures_from_solve

        lcu_figs = figures_from_solve(problem, grid, spec, params, x_full, w_int_norm, exact_x)
    t4 = time.perf_counter()
    timings = {
        "setup_ms": 1e3 * (t1 - t0),
        "params_ms": 1e3 * (t2 - t1),
        "integrate_ms": 1e3 * (t3 - t2),
        "report_ms": 1e3 * (t4 - t3),
    }
    return SolveReport(x, residual, gap, params, lcu_figs, timings, x_full)


# --- cross-validation paths ------------------------------------------------

def steady_state_source(problem, grid, spec, T: float, method: str = "expm", steps: int | None = None):
    """p = 0 slice at time T of the sourced system dw~/dt = i (D_mu (x) A) w~ + zeta~ (x) b, w~(0) = 0.

    ``expm``: per-mode block exponential of [[i mu_l A, zeta~_l b], [0, 0]];
    ``eigen``: variation of constants in the eigenbasis;
    ``rk4``: classical Runge-Kutta on all modes with ``steps`` steps.
    """
    spec = KernelSpec.from_token(spec)
    k0 = grid.require_zero()
    zt = zeta_coeffs(grid, spec)
    b = np.asarray(problem.b, dtype=complex)
    readout = np.exp(1j * grid.frequencies * (grid.points[k0] - grid.a))
    N = problem.N
    if T == 0:
        return np.zeros(N, dtype=complex)
    if method == "eigen":
        eig = problem.eig
        sig = time_integral_factor(np.multiply.outer(grid.frequencies, eig.values), T)
        bbar = eig.to_eigenframe(b)
        return eig.vectors @ (((readout * zt) @ sig) * bbar)
    if method == "expm":
        A = np.asarray(problem.A, dtype=complex)
        out = np.zeros(N, dtype=complex)
        aug = np.zeros((N + 1, N + 1), dtype=complex)
        for l, mu in enumerate(grid.frequencies):
            if zt[l] == 0:
                continue
            aug[:N, :N] = 1j * mu * A
            aug[:N, N] = zt[l] * b
            out += readout[l] * sla.expm(T * aug)[:N, N]
        return out
    if method == "rk4":
        A = np.asarray(problem.A, dtype=complex)
        if steps is None:
            steps = max(1, math.ceil(4.0 * T * auxgrid.momentum_norm(grid) * problem.norm))
        h = T / steps
        mu = grid.frequencies[:, None]
        src = np.outer(zt, b)

        def rhs(w):
            return 1j * mu * (w @ A.T) + src

        w = np.zeros((grid.N_p, N), dtype=complex)
        for _ in range(steps):
            k1 = rhs(w)
            k2 = rhs(w + 0.5 * h * k1)
            k3 = rhs(w + 0.5 * h * k2)
            k4 = rhs(w + h * k3)
            w = w + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return readout @ w
    raise ValueError(f"unknown method {method!r}")


def ode_steady_state_oracle(problem, k: int, t: float) -> np.ndarray:
    """u(t) of du/dt = -A^k u + A^{k-1} b, u(0) = 0, via matrix exponentials.

    k = 2: u = (I - exp(-(A t)^2 / 2)) A^{-1} b; k = 1: u = (I - exp(-A t)) A^{-1} b.
    """
    A = np.asarray(problem.A)
    b = np.asarray(problem.b)
    if k == 2:
        E = sla.expm(-0.5 * (A @ A) * t * t)
    elif k == 1:
        if not problem.positive_definite:
            raise InvariantViolation("k = 1 requires a positive definite matrix")
        E = sla.expm(-A * t)
    else:
        raise ValueError("k must be 1 or 2")
    y = np.linalg.solve(A, b)
    return y - E @ y


def lchs_integral_oracle(A, b, spec="fourier-odd", T: float = 20.0, K: float = 12.0,
                         tol: float = 1e-10, nodes: int = 16) -> np.ndarray:
    """Brute-force int_0^T int_{-K}^{K} eta(k) exp(-i k A s) b dk ds.

    Tensor-product composite Gauss-Legendre in (s, k), evaluated per eigenvalue.
    A k-panel spans at most 12 radians of the largest phase |lam|max T and an
    s-panel spans lam s <= 2. ``tol`` warns when eta(+-K) is not negligible.
    """
    spec = KernelSpec.from_token(spec)
    A = np.asarray(A)
    b = np.asarray(b, dtype=complex)
    if A.shape[0] > 16:
        raise ValueError("brute-force oracle is limited to N <= 16")
    if spec.variant is KernelVariant.EXP_ABS:
        raise UnsupportedOperation("the oracle needs eta(k)")
    if abs(kernel_eta(spec, K)) > tol:
        log.warning("eta(K) = %.3g exceeds tol", abs(kernel_eta(spec, K)))
    lam, U = np.linalg.eigh(A)
    lam_max = float(np.max(np.abs(lam)))
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    nk = max(1, math.ceil(2.0 * K * lam_max * T / 12.0))
    hk = 2.0 * K / nk
    kk = (-K + hk * (np.arange(nk)[:, None] + x)).ravel()
    wk = np.tile(hk * w, nk)
    ns = max(1, math.ceil(0.5 * T * lam_max))
    hs = T / ns
    ss = (hs * (np.arange(ns)[:, None] + x)).ravel()
    ws = np.tile(hs * w, ns)
    eta_w = kernel_eta(spec, kk) * wk
    vals = np.empty(lam.size, dtype=complex)
    block = max(1, (1 << 21) // kk.size)
    for j, lj in enumerate(lam):
        total = 0.0 + 0.0j
        for i in range(0, ss.size, block):
            s = ss[i:i + block]
            inner = np.exp(-1j * lj * np.outer(s, kk)) @ eta_w
            total += ws[i:i + block] @ inner
        vals[j] = total
    return U @ (vals * (U.conj().T @ b))
