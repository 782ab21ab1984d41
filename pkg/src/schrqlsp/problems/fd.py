"""Central-difference Poisson problem -u'' = f on (a, b) with Dirichlet data."""
from __future__ import annotations

import numpy as np

from .system import DiscreteSystem, ExactSolution


def poisson1d_fd(M: int, f, u_left: float, u_right: float, a: float = 0.0, b: float = 1.0,
                 exact: ExactSolution | None = None) -> DiscreteSystem:
    """(M-1) x (M-1) system (1/dx^2) tridiag(-1, 2, -1) u = f + boundary lift."""
    if int(M) != M or M < 2:
        raise ValueError("M must be an integer >= 2")
    M = int(M)
    dx = (b - a) / M
    x = a + dx * np.arange(1, M)
    n = M - 1
    A = (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / dx ** 2
    rhs = np.asarray(f(x), dtype=float) * np.ones(n)
    rhs[0] += u_left / dx ** 2
    rhs[-1] += u_right / dx ** 2
    return DiscreteSystem(A, rhs, exact, {"x": x, "dx": dx, "kind": "fd1d"})


def poisson1d_manufactured(M: int) -> DiscreteSystem:
    """u = exp(-x) on (0, 1), so f = -exp(-x)."""
    ex = ExactSolution(u=lambda x: np.exp(-x), grad=lambda x: -np.exp(-x), f=lambda x: -np.exp(-x))
    return poisson1d_fd(M, ex.f, 1.0, np.exp(-1.0), exact=ex)


def nodal_error(sys: DiscreteSystem, x) -> float:
    """max_i |x_i - u(x_i)|."""
    if sys.exact is None:
        raise ValueError("system has no exact solution")
    return float(np.max(np.abs(np.real(x) - sys.exact.u(sys.meta["x"]))))
