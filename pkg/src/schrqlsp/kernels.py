"""Kernel functions for the auxiliary-variable convection system.

Each kernel is given in two forms: ``eta(k)``, the weight in the integral
representation of the inverse over Hamiltonian simulations, and its Fourier
transform ``zeta(p)``, which becomes the initial profile in ``p``.

=================  =============================  ==============================
token              eta(k)                         zeta(p)
=================  =============================  ==============================
``fourier-odd``    i k exp(-k^2/2) / sqrt(2 pi)   p exp(-p^2/2)
``gaussian``       exp(-k^2/2) / pi               sqrt(2/pi) exp(-p^2/2)
``exp-abs``        (not evaluated)                exp(-|p|)
=================  =============================  ==============================
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import UnsupportedOperation

SQRT_2_PI = math.sqrt(2.0 * math.pi)
GAUSS_AMP = math.sqrt(2.0 / math.pi)


class KernelVariant(enum.Enum):
    FOURIER_ODD = "fourier-odd"
    GAUSSIAN = "gaussian"
    EXP_ABS = "exp-abs"


@dataclass(frozen=True)
class KernelSpec:
    variant: KernelVariant = KernelVariant.FOURIER_ODD

    @classmethod
    def from_token(cls, token: "str | KernelSpec | KernelVariant") -> "KernelSpec":
        if isinstance(token, KernelSpec):
            return token
        if isinstance(token, KernelVariant):
            return cls(token)
        try:
            return cls(KernelVariant(token))
        except ValueError:
            valid = ", ".join(v.value for v in KernelVariant)
            raise ValueError(f"unknown kernel {token!r}; expected one of {valid}") from None

    @property
    def token(self) -> str:
        return self.variant.value

    @property
    def smooth(self) -> bool:
        return self.variant is not KernelVariant.EXP_ABS

    @property
    def requires_positive_spectrum(self) -> bool:
        """Only the odd kernel integrates to 1/lambda for both signs of lambda."""
        return self.variant is not KernelVariant.FOURIER_ODD

    @property
    def parity(self) -> int:
        return -1 if self.variant is KernelVariant.FOURIER_ODD else 1


FOURIER_ODD = KernelSpec(KernelVariant.FOURIER_ODD)
GAUSSIAN = KernelSpec(KernelVariant.GAUSSIAN)
EXP_ABS = KernelSpec(KernelVariant.EXP_ABS)


def _check_finite(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("kernel argument must be finite")
    return arr


def _scalar_or_array(out, like):
    return float(out) if np.ndim(like) == 0 else out


def kernel_zeta(spec: KernelSpec, p):
    """Evaluate the p-space profile zeta(p). Accepts scalars or arrays."""
    spec = KernelSpec.from_token(spec)
    x = _check_finite(p)
    if spec.variant is KernelVariant.FOURIER_ODD:
        out = x * np.exp(-0.5 * x * x)
    elif spec.variant is KernelVariant.GAUSSIAN:
        out = GAUSS_AMP * np.exp(-0.5 * x * x)
    else:
        out = np.exp(-np.abs(x))
    return _scalar_or_array(out, p)


def kernel_eta(spec: KernelSpec, k):
    """Evaluate the k-space weight eta(k) (complex)."""
    spec = KernelSpec.from_token(spec)
    if spec.variant is KernelVariant.EXP_ABS:
        raise UnsupportedOperation("eta(k) is not evaluated for the exp-abs kernel")
    x = _check_finite(k)
    if spec.variant is KernelVariant.FOURIER_ODD:
        out = (1j / SQRT_2_PI) * x * np.exp(-0.5 * x * x)
    else:
        out = (np.exp(-0.5 * x * x) / math.pi).astype(complex)
    return complex(out) if np.ndim(k) == 0 else out


# --- derivatives -----------------------------------------------------------

def _hermite_coeffs(n: int) -> np.ndarray:
    """Power-basis coefficients of the probabilists' Hermite polynomial He_n.

    Uses He_{n+1}(p) = p He_n(p) - n He_{n-1}(p).
    """
    prev = np.array([1.0])
    if n == 0:
        return prev
    cur = np.array([0.0, 1.0])
    for j in range(1, n):
        nxt = np.zeros(j + 2)
        nxt[1:] = cur
        nxt[: j] -= j * prev
        prev, cur = cur, nxt
    return cur


def hermite_e(n: int, x):
    """He_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    h0 = np.ones_like(x)
    if n == 0:
        return h0
    h1 = x.copy()
    for j in range(1, n):
        h0, h1 = h1, x * h1 - j * h0
    return h1


def _gaussian_family(spec: KernelSpec, order: int):
    """(scale, hermite degree) with zeta^(i)(p) = scale * He_deg(p) exp(-p^2/2)."""
    sign = -1.0 if order % 2 else 1.0
    if spec.variant is KernelVariant.FOURIER_ODD:
        return sign, order + 1
    return sign * GAUSS_AMP, order


def kernel_derivative(spec: KernelSpec, order: int, p):
    """i-th derivative of zeta. exp-abs supports order 0 and the a.e. order-1 derivative."""
    spec = KernelSpec.from_token(spec)
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    x = _check_finite(p)
    if spec.variant is KernelVariant.EXP_ABS:
        if order == 0:
            out = np.exp(-np.abs(x))
        elif order == 1:
            out = -np.sign(x) * np.exp(-np.abs(x))
        else:
            raise UnsupportedOperation("exp-abs kernel has no derivatives beyond order 1")
        return _scalar_or_array(out, p)
    scale, deg = _gaussian_family(spec, order)
    out = scale * hermite_e(deg, x) * np.exp(-0.5 * x * x)
    return _scalar_or_array(out, p)


def _envelope_radius(scale: float, deg: int, delta: float) -> float:
    """Smallest r with |scale| * Pabs(x) exp(-x^2/2) <= delta for all x >= r.

    Pabs has the absolute values of the He_deg coefficients, so it dominates
    |He_deg| on x >= 0, and Pabs(x) exp(-x^2/2) is decreasing for x >= sqrt(deg).
    The returned value certifies |zeta^(i)(x)| <= delta beyond it.
    """
    coeffs = np.abs(_hermite_coeffs(deg)) * abs(scale)

    def env(x):
        return np.polynomial.polynomial.polyval(x, coeffs) * math.exp(-0.5 * x * x)

    lo = math.sqrt(deg)
    if env(lo) <= delta:
        return lo
    hi = max(2.0 * lo, 1.0)
    while env(hi) > delta:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if env(mid) > delta:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * hi:
            break
    return hi


def _exact_crossing(f, delta, r_env):
    """Refine the envelope radius down to the last crossing of |f| = delta on [0, r_env]."""
    xs = np.linspace(0.0, r_env, 4097)
    above = np.abs(f(xs)) > delta
    if not above.any():
        return 0.0
    i = int(np.nonzero(above)[0][-1])
    if i == len(xs) - 1:
        return r_env
    lo, hi = xs[i], xs[i + 1]
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if abs(f(mid)) > delta:
            lo = mid
        else:
            hi = mid
    return hi


def kernel_tail_radius(spec: KernelSpec, m: int, delta: float) -> float:
    """Radius beyond which zeta and its derivatives up to order max(m-1, 0) stay below delta.

    Beyond the returned radius the bound is certified by a monotone envelope;
    inside, the radius is tightened to the last sampled crossing.
    """
    spec = KernelSpec.from_token(spec)
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if m < 0:
        raise ValueError("m must be nonnegative")
    top = max(m - 1, 0)
    if spec.variant is KernelVariant.EXP_ABS:
        if m > 1:
            raise UnsupportedOperation("exp-abs tail radius is only defined for m <= 1")
        return math.log(1.0 / delta)
    radius = 0.0
    for i in range(top + 1):
        scale, deg = _gaussian_family(spec, i)
        r_env = _envelope_radius(scale, deg, delta)
        r = _exact_crossing(lambda x, i=i: kernel_derivative(spec, i, x), delta, r_env)
        radius = max(radius, r)
    return radius


def kernel_seminorm(spec: KernelSpec, m: int, a: float, b: float) -> float:
    """|zeta|_m = ||zeta^(m)||_{L2[a, b]} by adaptive quadrature."""
    spec = KernelSpec.from_token(spec)
    if not a < b:
        raise ValueError("need a < b")
    if m < 0:
        raise ValueError("m must be nonnegative")
    if spec.variant is KernelVariant.EXP_ABS and m >= 1:
        raise UnsupportedOperation("exp-abs kernel is not differentiable at 0")

    def sq(x):
        return kernel_derivative(spec, m, x) ** 2

    # the integrand is negligible beyond |p| ~ 2 sqrt(m) + 40; split at 0 for exp-abs
    cut = 2.0 * math.sqrt(m + 1) + 40.0
    lo, hi = max(a, -cut), min(b, cut)
    if lo >= hi:
        return 0.0
    pts = [0.0] if lo < 0.0 < hi else None
    val, _ = integrate.quad(sq, lo, hi, epsabs=0.0, epsrel=1e-10, limit=500, points=pts)
    return math.sqrt(val)


def kernel_time_integral(spec: KernelSpec, lam, T: float):
    """Closed form of int_0^T zeta(lam * s) ds.

    For the odd kernel this is (1 - exp(-(lam T)^2 / 2)) / lam for either sign
    of lam; the even kernels give 1/|lam| asymptotically and are only
    consistent with the inverse when lam > 0.
    """
    spec = KernelSpec.from_token(spec)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam == 0.0):
        raise ValueError("lambda must be nonzero")
    x = lam * T
    if spec.variant is KernelVariant.FOURIER_ODD:
        out = -np.expm1(-0.5 * x * x) / lam
    elif spec.variant is KernelVariant.GAUSSIAN:
        out = special.erf(x / math.sqrt(2.0)) / lam
    else:
        out = -np.sign(lam) * np.expm1(-np.abs(x)) / lam
    return float(out) if out.ndim == 0 else out
