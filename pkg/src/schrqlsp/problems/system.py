from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import InvariantViolation


@dataclass(frozen=True)
class ExactSolution:
    u: Callable
    grad: Callable | None = None
    f: Callable | None = None


@dataclass
class DiscreteSystem:
    """SPD system A x = b with optional exact solution and geometry for error norms."""

    A: np.ndarray
    b: np.ndarray
    exact: ExactSolution | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
            raise ValueError("inconsistent system dimensions")
        if np.max(np.abs(A - A.T)) > 1e-12 * np.max(np.abs(A)):
            raise InvariantViolation("system matrix is not symmetric")
        if np.linalg.eigvalsh(A)[0] <= 0:
            raise InvariantViolation("system matrix is not positive definite")
        self.A = A
        self.b = b

    @property
    def N(self) -> int:
        return self.A.shape[0]

    def direct_solution(self) -> np.ndarray:
        return np.linalg.solve(self.A, self.b)
