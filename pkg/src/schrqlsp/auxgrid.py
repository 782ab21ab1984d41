"""Uniform periodic grid in the auxiliary variable p with its Fourier maps.

Coefficients are stored in the order l = 0..N_p-1 with frequencies
mu_l = 2 pi (l - N_p/2) / (b - a), so the discrete momentum operator is the
diagonal ``diag(mu)`` in this order. Internally the transforms go through
``numpy.fft`` and are re-indexed with fftshift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import GridError

MAX_LOG2_POINTS = 24


@dataclass(frozen=True)
class AuxGrid:
    a: float
    b: float
    n_p: int
    zero_index: int | None = None
    points: np.ndarray = field(repr=False, compare=False, default=None)
    frequencies: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def N_p(self) -> int:
        return 1 << self.n_p

    @property
    def dp(self) -> float:
        return (self.b - self.a) / self.N_p

    @property
    def length(self) -> float:
        return self.b - self.a

    def require_zero(self) -> int:
        if self.zero_index is None:
            raise GridError(f"p = 0 is not a grid point of [{self.a}, {self.b}] with N_p = {self.N_p}")
        return self.zero_index

    def basis(self, l: int) -> np.ndarray:
        """Samples of phi_l(p) = exp(i mu_l (p - a)) at the grid points."""
        return np.exp(1j * self.frequencies[l] * (self.points - self.a))


def _make(a, b, n_p, zero_index):
    N = 1 << n_p
    dp = (b - a) / N
    k = np.arange(N)
    if zero_index is not None:
        points = (k - zero_index) * dp
    else:
        points = a + k * dp
    mu = 2.0 * math.pi * (k - N // 2) / (b - a)
    points.flags.writeable = False
    mu.flags.writeable = False
    return AuxGrid(float(a), float(b), int(n_p), zero_index, points, mu)


def build_grid(a: float, b: float, n_p: int) -> AuxGrid:
    """Grid of N_p = 2**n_p points p_k = a + k dp on [a, b)."""
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"need finite a < b, got [{a}, {b}]")
    if not 1 <= n_p <= MAX_LOG2_POINTS:
        raise ValueError(f"n_p must lie in [1, {MAX_LOG2_POINTS}], got {n_p}")
    N = 1 << n_p
    # -a/dp = -a N / (b - a), evaluated exactly on the binary floats
    ratio = -Fraction(a) * N / (Fraction(b) - Fraction(a))
    zero = int(ratio) if ratio.denominator == 1 and 0 <= ratio < N else None
    return _make(a, b, n_p, zero)


def symmetric_grid(R: float, n_p: int) -> AuxGrid:
    """Grid on [-pi R, pi R]; p = 0 is the point N_p / 2."""
    if not R > 0:
        raise ValueError("R must be positive")
    grid = build_grid(-math.pi * R, math.pi * R, n_p)
    assert grid.zero_index == grid.N_p // 2
    return grid


def grid_with_zero(L: float, R: float, n_p: int) -> AuxGrid:
    """Grid covering [-L, R] that has p = 0 as a grid point.

    The zero index is k_* = max(1, floor(N_p L / (L + R))) and
    dp = max(L / k_*, R / (N_p - k_*)), so both ends can only grow. When
    k_* is not clamped, dp = L / k_* and the left end is exactly -L.
    """
    if not (L > 0 and R > 0):
        raise ValueError("L and R must be positive")
    if not 1 <= n_p <= MAX_LOG2_POINTS:
        raise ValueError(f"n_p must lie in [1, {MAX_LOG2_POINTS}], got {n_p}")
    N = 1 << n_p
    k0 = int(math.floor(N * L / (L + R)))
    k0 = min(max(k0, 1), N - 1)
    dp = max(L / k0, R / (N - k0))
    return _make(-k0 * dp, (N - k0) * dp, n_p, k0)


def _check_len(grid: AuxGrid, arr: np.ndarray):
    if arr.shape[0] != grid.N_p:
        raise ValueError(f"expected leading dimension {grid.N_p}, got {arr.shape[0]}")


def forward_coeffs(grid: AuxGrid, values) -> np.ndarray:
    """Interpolation coefficients u~_l = (1/N_p) sum_k u(p_k) exp(-i mu_l (p_k - a)).

    ``values`` may be (N_p,) or (N_p, N); the transform acts along axis 0.
    """
    v = np.asarray(values, dtype=complex)
    _check_len(grid, v)
    return np.fft.fftshift(np.fft.fft(v, axis=0), axes=0) / grid.N_p


def inverse_transform(grid: AuxGrid, coeffs) -> np.ndarray:
    """Grid values u(p_k) = sum_l u~_l phi_l(p_k)."""
    c = np.asarray(coeffs, dtype=complex)
    _check_len(grid, c)
    return np.fft.ifft(np.fft.ifftshift(c, axes=0), axis=0) * grid.N_p


def evaluate_at(grid: AuxGrid, coeffs, p: float) -> np.ndarray:
    """Trigonometric interpolant sum_l u~_l phi_l(p) at an arbitrary point."""
    c = np.asarray(coeffs, dtype=complex)
    phase = np.exp(1j * grid.frequencies * (p - grid.a))
    return np.tensordot(phase, c, axes=(0, 0))


def momentum_norm(grid: AuxGrid) -> float:
    """||D_mu|| = max_l |mu_l| (attained at l = 0)."""
    return float(np.max(np.abs(grid.frequencies)))


def apply_momentum(grid: AuxGrid, values) -> np.ndarray:
    """Discrete momentum operator Phi D_mu Phi^{-1}, approximating -i d/dp."""
    c = forward_coeffs(grid, values)
    mu = grid.frequencies.reshape((-1,) + (1,) * (c.ndim - 1))
    return inverse_transform(grid, mu * c)
