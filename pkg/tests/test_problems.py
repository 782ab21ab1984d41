import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schrqlsp.errors import InvariantViolation
from schrqlsp.problems import (
    DiscreteSystem,
    MANUFACTURED,
    bpx,
    build_hierarchy,
    fem_error_norms,
    poisson1d_fd,
    poisson1d_manufactured,
    poisson2d_manufactured,
    poisson2d_p1,
    preconditioned_problem,
)
from schrqlsp.problems.fd import nodal_error
from schrqlsp.problems.fem import nodal_field


@pytest.fixture(scope="module")
def hier():
    return build_hierarchy(4)


# --- finite differences ----------------------------------------------------

def test_fd_stencil_values():
    sys = poisson1d_fd(4, lambda x: 0 * x, 0.0, 0.0)
    assert sys.A.shape == (3, 3)
    np.testing.assert_array_equal(np.diag(sys.A), 32.0)
    np.testing.assert_array_equal(np.diag(sys.A, 1), -16.0)
    np.testing.assert_array_equal(np.diag(sys.A, -1), -16.0)
    np.testing.assert_array_equal(sys.direct_solution(), 0.0)


def test_fd_boundary_lift():
    sys = poisson1d_fd(4, lambda x: 0 * x, 2.0, 3.0)
    np.testing.assert_allclose(sys.b, [32.0, 0.0, 48.0])
    np.testing.assert_allclose(sys.direct_solution(), [2.25, 2.5, 2.75])


@pytest.mark.parametrize("M", [1, 0, 2.5])
def test_fd_invalid(M):
    with pytest.raises(ValueError):
        poisson1d_fd(M, lambda x: x, 0.0, 0.0)


@given(st.integers(2, 60))
@settings(max_examples=25)
def test_fd_spectrum_closed_form(M):
    sys = poisson1d_fd(M, lambda x: x, 0.0, 0.0)
    dx = 1.0 / M
    j = np.arange(1, M)
    closed = np.sort(2 / dx ** 2 * (1 - np.cos(j * np.pi / M)))
    lam = np.linalg.eigvalsh(sys.A)
    assert np.all(lam > 0)
    np.testing.assert_allclose(lam, closed, rtol=1e-10, atol=1e-10)


def test_fd_manufactured_error():
    e10 = nodal_error(s := poisson1d_manufactured(10), s.direct_solution())
    assert e10 == pytest.approx(6.447530974695859e-05, rel=1e-9)  # banded-solver oracle
    e20 = nodal_error(s := poisson1d_manufactured(20), s.direct_solution())
    assert e10 / e20 == pytest.approx(4.0, rel=0.02)


# --- meshes ----------------------------------------------------------------

def test_hierarchy_counts(hier):
    assert hier.J == 4
    assert hier.levels[0].n_interior == 1
    for j, lev in enumerate(hier.levels):
        assert lev.n_interior == (2 * 2 ** j - 1) ** 2
        assert lev.h == pytest.approx(0.5 * 2.0 ** -j)
        assert lev.triangles.shape[0] == 2 * (2 * 2 ** j) ** 2


@pytest.mark.parametrize("J", [-1, 8])
def test_hierarchy_range(J):
    with pytest.raises(ValueError):
        build_hierarchy(J)


def test_prolongation_structure(hier):
    for i in range(hier.J):
        P = hier.prolongations[i].toarray()
        np.testing.assert_allclose(P.sum(axis=1), 1.0)
        nc = hier.levels[i].vertices.shape[0]
        np.testing.assert_array_equal(P[:nc], np.eye(nc))
        mid = P[nc:]
        assert np.all(np.sort(mid, axis=1)[:, -2:] == 0.5)
        assert np.all(np.count_nonzero(mid, axis=1) == 2)
        np.testing.assert_array_equal(hier.levels[i + 1].vertices[:nc], hier.levels[i].vertices)


def test_prolongation_chain(hier):
    for j in range(hier.J + 1):
        Ij = hier.chain(j)
        assert Ij.shape == (hier.levels[-1].n_interior, hier.levels[j].n_interior)
    I02 = hier.chain(0, 2).toarray()
    np.testing.assert_allclose(I02, (hier.interior_prolongation(1) @ hier.interior_prolongation(0)).toarray())
    with pytest.raises(ValueError):
        hier.chain(3, 2)


def test_prolongation_interpolates_linears(hier):
    lin = lambda v: 1.0 + 2.0 * v[:, 0] - 3.0 * v[:, 1]
    for i in range(hier.J):
        coarse, fine = hier.levels[i].vertices, hier.levels[i + 1].vertices
        np.testing.assert_allclose(hier.prolongations[i] @ lin(coarse), lin(fine), atol=1e-13)


# --- finite elements -------------------------------------------------------

def test_galerkin_consistency(hier):
    fine = poisson2d_p1(hier, hier.J).A
    for j in range(hier.J):
        Ij = hier.chain(j).toarray()
        direct = poisson2d_p1(hier, j).A
        np.testing.assert_allclose(Ij.T @ fine @ Ij, direct, atol=1e-10)


def test_five_point_stencil(hier):
    sys = poisson2d_p1(hier, 2)
    n = 2 * 2 ** 2 - 1
    T = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    five = np.kron(np.eye(n), T) + np.kron(T, np.eye(n))
    mesh = sys.meta["mesh"]
    order = np.lexsort((mesh.vertices[mesh.interior, 0], mesh.vertices[mesh.interior, 1]))
    np.testing.assert_allclose(sys.A[np.ix_(order, order)], five, atol=1e-12)


def test_zero_data_gives_zero(hier):
    sys = poisson2d_p1(hier, 2, f=lambda x, y: 0 * x, dirichlet=lambda x, y: 0 * x)
    np.testing.assert_array_equal(sys.direct_solution(), 0.0)
    with pytest.raises(ValueError):
        poisson2d_p1(hier, 5)


def test_linear_solution_reproduced(hier):
    from schrqlsp.problems import ExactSolution

    ex = ExactSolution(u=lambda x, y: 1 + x - 2 * y, grad=lambda x, y: (1 + 0 * x, -2 + 0 * y))
    sys = poisson2d_p1(hier, 3, f=None, dirichlet=ex.u, exact=ex)
    l2, h1 = fem_error_norms(sys, sys.direct_solution())
    assert l2 <= 1e-12 and h1 <= 1e-12


def test_interpolant_error_ratios(hier):
    errs = []
    for j in (2, 3):
        sys = poisson2d_manufactured(hier, j)
        v = sys.meta["mesh"].vertices[sys.meta["mesh"].interior]
        errs.append(fem_error_norms(sys, MANUFACTURED.u(v[:, 0], v[:, 1])))
    assert errs[0][0] / errs[1][0] == pytest.approx(4.0, rel=0.1)
    assert errs[0][1] / errs[1][1] == pytest.approx(2.0, rel=0.1)


def test_zero_vector_error_is_solution_norm(hier):
    sys = poisson2d_manufactured(hier, 4)
    sys.meta["lift"] = np.zeros_like(sys.meta["lift"])
    l2, _ = fem_error_norms(sys, np.zeros(sys.N))
    assert l2 == pytest.approx(math.sqrt(0.1), rel=1e-3)  # sqrt(int y^4 int sin^2)


def test_nodal_field_includes_lift(hier):
    sys = poisson2d_manufactured(hier, 2)
    u = nodal_field(sys, sys.direct_solution())
    v = sys.meta["mesh"].vertices
    bnd = sys.meta["mesh"].boundary
    np.testing.assert_allclose(u[bnd], MANUFACTURED.u(v[bnd, 0], v[bnd, 1]))


def test_error_norms_need_exact(hier):
    sys = poisson2d_p1(hier, 1)
    with pytest.raises(ValueError):
        fem_error_norms(sys, np.zeros(sys.N))


def test_discrete_system_checks():
    with pytest.raises(InvariantViolation):
        DiscreteSystem(np.array([[1.0, 2.0], [0.0, 1.0]]), np.ones(2))
    with pytest.raises(InvariantViolation):
        DiscreteSystem(np.diag([1.0, -1.0]), np.ones(2))
    with pytest.raises(ValueError):
        DiscreteSystem(np.eye(2), np.ones(3))


# --- BPX -------------------------------------------------------------------

def test_bpx_single_level():
    h0 = build_hierarchy(0)
    np.testing.assert_array_equal(bpx(h0), np.eye(1))


def test_bpx_symmetric_spd(hier):
    B = bpx(hier, 3)
    assert np.array_equal(B, B.T)
    assert np.linalg.eigvalsh(B)[0] > 0


def test_bpx_condition_numbers(hier):
    kA, kBA = [], []
    for j in range(hier.J + 1):
        A = poisson2d_p1(hier, j).A
        B = bpx(hier, j)
        L = np.linalg.cholesky(B)
        lam = np.linalg.eigvalsh(L.T @ A @ L)
        kA.append(np.linalg.cond(A))
        kBA.append(lam[-1] / lam[0])
    assert kBA[-1] < kA[-1] / 10
    ratios_A = np.array(kA[2:]) / np.array(kA[1:-1])
    assert np.all((ratios_A > 3.5) & (ratios_A < 4.5))
    # growth is bounded from the second refinement on
    np.testing.assert_allclose(kBA[1:], [2.87, 5.31, 7.06, 8.27], rtol=5e-3)
    ratios = np.array(kBA[3:]) / np.array(kBA[2:-1])
    assert np.all(ratios < 1.6)


def test_preconditioned_identity_reduces(hier):
    sys = poisson2d_manufactured(hier, 2)
    pre = preconditioned_problem(sys, np.eye(sys.N))
    np.testing.assert_allclose(pre.W, sys.A)
    assert pre.kappa_plus == pytest.approx(np.linalg.cond(sys.A), rel=1e-10)
    assert pre.kappa_minus == 0.0
    assert pre.L >= pre.R


def test_preconditioned_spectrum(hier):
    sys = poisson2d_manufactured(hier, 2)
    pre = preconditioned_problem(sys, bpx(hier, 2))
    assert pre.lam_min > 0
    lam = np.sort(np.linalg.eigvals(pre.W).real)
    np.testing.assert_allclose(lam, np.sort(pre.problem.eig.values), rtol=1e-10)
    x = np.linalg.solve(pre.W, pre.c)
    np.testing.assert_allclose(x, sys.direct_solution(), atol=1e-12)
    assert pre.L >= pre.R if pre.kappa_plus >= pre.kappa_minus else True


def test_preconditioned_domain_widening(hier):
    sys = poisson2d_manufactured(hier, 2)
    B = bpx(hier, 2)
    base = preconditioned_problem(sys, B, eps=1e-3)
    wide = preconditioned_problem(sys, B, eps=1e-3, T=15.0)
    assert wide.L_formula == pytest.approx(base.L)
    assert wide.L >= wide.lam_max * 15.0 + math.log(1e3) - 1e-12
    assert wide.R >= math.log(1e3)
    with pytest.raises(InvariantViolation):
        preconditioned_problem(sys, -B)
