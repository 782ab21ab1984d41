"""Reproducible experiment tables shared by the CLI and the acceptance tests.

Each demo returns a list of row dicts with the columns
level_or_T, l2_error, h1_error_or_blank, residual, runtime_ms.
Mesh levels are counted from 1 for the coarsest (2 x 2 cell) mesh.
"""
from __future__ import annotations

import time

import numpy as np

from . import solver
from .problems import (
    bpx,
    build_hierarchy,
    fem_error_norms,
    poisson1d_manufactured,
    poisson2d_manufactured,
    preconditioned_problem,
)
from .problems.fd import nodal_error

COLUMNS = ("level_or_T", "l2_error", "h1_error_or_blank", "residual", "runtime_ms")

NS3X3_A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
NS3X3_B = np.ones(3)
NS3X3_X = np.array([1.0, 0.0, 1.0])

# p-grid used when no override is given (R = 15, N_p = 2^9)
REFERENCE_GRID = {"R": 15.0, "n_p": 9}
POISSON2D_SMALL_T = {"T": 20.0, "R": 15.0, "n_p": 9}
POISSON2D_LARGE_T = {"T": 50.0, "R": 35.0, "n_p": 11}
BPX_SETTINGS = {"T": 15.0, "n_p": 11, "eps": 1e-3}


def _row(level_or_T, l2, h1, residual, ms):
    return {"level_or_T": level_or_T, "l2_error": l2, "h1_error_or_blank": h1,
            "residual": residual, "runtime_ms": ms}


def _merge(base, overrides):
    out = dict(base)
    out.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return out


def ns3x3(times=(10.0, 15.0), overrides=None, exact_integral=False, delta=1e-6):
    """Dilated 3 x 3 bidiagonal system; error ||x - (1, 0, 1)||."""
    rows = []
    for T in times:
        ov = {**_merge(REFERENCE_GRID, overrides), "T": T}
        t0 = time.perf_counter()
        rep = solver.solve(NS3X3_A, NS3X3_B, delta, overrides=ov, exact_integral=exact_integral,
                           strict=False, compute_lcu=False)
        ms = 1e3 * (time.perf_counter() - t0)
        rows.append(_row(ov["T"], float(np.linalg.norm(rep.x - NS3X3_X)), None, rep.residual, ms))
    return rows


def poisson1d(Ms=(10, 20, 40), delta=1e-8, overrides=None):
    """FD Poisson with u = exp(-x); l2_error is the max nodal error."""
    rows = []
    for M in Ms:
        sys = poisson1d_manufactured(M)
        t0 = time.perf_counter()
        rep = solver.solve(sys.A, sys.b, delta, overrides=overrides, strict=overrides is None,
                           compute_lcu=False)
        ms = 1e3 * (time.perf_counter() - t0)
        rows.append(_row(M, nodal_error(sys, rep.x), None, rep.residual, ms))
    return rows


def poisson2d(levels=(1, 2, 3, 4), overrides=None, delta=1e-6):
    """P1 FEM with u = y^2 sin(pi x); defaults to the small-T parameters T = 20, R = 15, N_p = 2^9."""
    ov = _merge(POISSON2D_SMALL_T, overrides)
    hier = build_hierarchy(max(levels) - 1)
    rows = []
    for lev in levels:
        sys = poisson2d_manufactured(hier, lev - 1)
        t0 = time.perf_counter()
        rep = solver.solve(sys.A, sys.b, delta, overrides=ov, strict=False, compute_lcu=False)
        ms = 1e3 * (time.perf_counter() - t0)
        l2, h1 = fem_error_norms(sys, rep.x)
        rows.append(_row(lev, l2, h1, rep.residual, ms))
    return rows


def poisson2d_bpx(levels=(1, 2, 3), T=None, n_p=None, eps=None, multiplier=1.0):
    """BPX-preconditioned P1 solve W x = Bb with the exp(-|p|) kernel on [-L, R]."""
    T = BPX_SETTINGS["T"] if T is None else T
    n_p = BPX_SETTINGS["n_p"] if n_p is None else n_p
    eps = BPX_SETTINGS["eps"] if eps is None else eps
    hier = build_hierarchy(max(levels) - 1)
    rows = []
    for lev in levels:
        j = lev - 1
        sys = poisson2d_manufactured(hier, j)
        t0 = time.perf_counter()
        pre = preconditioned_problem(sys, bpx(hier, j), eps=eps, multiplier=multiplier, T=T)
        rep = solver.solve(pre.problem, None, eps, kernel="exp-abs",
                           overrides={"T": T, "n_p": n_p, "L": pre.L, "R": pre.R},
                           strict=False, compute_lcu=False)
        ms = 1e3 * (time.perf_counter() - t0)
        l2, h1 = fem_error_norms(sys, rep.x)
        rows.append(_row(lev, l2, h1, rep.residual, ms))
    return rows


DEMOS = {
    "ns3x3": ns3x3,
    "poisson1d": poisson1d,
    "poisson2d": poisson2d,
    "poisson2d-bpx": poisson2d_bpx,
}


def fitted_rate(levels, errors) -> float:
    """Least-squares slope of log(error) against log(1/h), with h halving per level."""
    lv = np.asarray(levels, dtype=float)
    e = np.asarray(errors, dtype=float)
    return float(np.polyfit(lv * np.log(2.0), np.log(e), 1)[0] * -1.0)
