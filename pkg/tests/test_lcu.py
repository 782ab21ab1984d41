import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_hermitian
from schrqlsp import lcu, solver
from schrqlsp.auxgrid import symmetric_grid
from schrqlsp.errors import UnsupportedOperation
from schrqlsp.evolution import HermitianProblem
from schrqlsp.kernels import FOURIER_ODD


def _params(prob, **ov):
    return solver.select_params(prob, FOURIER_ODD, 1e-3, ov, strict=False)


def _reference(ns3x3, Q=2, N_t=8):
    prob = solver.dilate(*ns3x3)
    p = _params(prob, T=10, R=15, n_p=9, Q=Q, tau=10 / N_t)
    return prob, p, p.grid()


# --- coefficient oracle ------------------------------------------------------

def test_coefficient_vector_examples():
    prob = HermitianProblem.from_matrix(np.eye(1), np.ones(1))
    alpha, l1 = lcu.coefficient_vector(_params(prob, T=2.0, tau=2.0, Q=1))
    np.testing.assert_allclose(alpha, [2.0])
    assert l1 == 2.0
    alpha, l1 = lcu.coefficient_vector(_params(prob, T=1.0, tau=0.5, Q=2))
    np.testing.assert_allclose(alpha, [0.25] * 4, atol=1e-15)


@given(st.floats(0.5, 200.0), st.integers(1, 50), st.integers(1, 12))
def test_alpha_sums_to_T(T, N_t, Q):
    prob = HermitianProblem.from_matrix(np.eye(1), np.ones(1))
    alpha, l1 = lcu.coefficient_vector(_params(prob, T=T, tau=T / N_t, Q=Q))
    assert np.all(alpha > 0)
    assert l1 == pytest.approx(T, rel=1e-12)


# --- emulated pipeline -------------------------------------------------------

def test_pipeline_reference_state(ns3x3):
    prob, p, g = _reference(ns3x3, Q=6, N_t=32)
    state, figs = lcu.emulate_pipeline(prob, g, FOURIER_ODD, p)
    x = solver.integrate_slice(prob, g, FOURIER_ODD, p)
    assert np.linalg.norm(state - x / np.linalg.norm(x)) <= 1e-10
    np.testing.assert_allclose(np.abs(state), np.array([0, 0, 0, 1, 0, 1]) / math.sqrt(2), atol=1e-4)
    np.testing.assert_allclose(figs.stage_norms, 1.0, atol=1e-12)
    assert figs.alpha_l1 == pytest.approx(10.0, rel=1e-12)


def test_pipeline_success_probability_definition(ns3x3):
    prob, p, g = _reference(ns3x3)
    _, figs = lcu.emulate_pipeline(prob, g, FOURIER_ODD, p)
    x = solver.integrate_slice(prob, g, FOURIER_ODD, p)
    w0 = figs.zeta_norm * np.linalg.norm(prob.b)
    assert figs.P_r == pytest.approx((np.linalg.norm(x) / (figs.alpha_l1 * w0)) ** 2, rel=1e-10)
    assert 0 <= figs.P_r <= figs.P_w <= 1
    assert figs.P_r == pytest.approx(figs.P_w * figs.P_x, rel=1e-12)
    assert figs.g == pytest.approx(1 / math.sqrt(figs.P_r), rel=1e-12)


def test_pipeline_matches_closed_form_figures(ns3x3):
    prob, p, g = _reference(ns3x3)
    _, em = lcu.emulate_pipeline(prob, g, FOURIER_ODD, p)
    x, wn = solver.slice_and_modes(prob, g, FOURIER_ODD, p, want_norm=True)
    an = lcu.figures_from_solve(prob, g, FOURIER_ODD, p, x, wn)
    for f in ("alpha_l1", "zeta_norm", "xi", "P_w", "P_x", "P_r", "g"):
        assert getattr(em, f) == pytest.approx(getattr(an, f), rel=1e-10), f


def test_pipeline_identity():
    prob = HermitianProblem.from_matrix(np.eye(3), np.array([1.0, 0, 0]))
    p = _params(prob, T=5.0, R=3.0, n_p=7, Q=2, tau=0.5)
    state, figs = lcu.emulate_pipeline(prob, p.grid(), FOURIER_ODD, p)
    np.testing.assert_allclose(np.abs(state), [1, 0, 0], atol=1e-12)
    assert 0 < figs.P_x <= 1


def test_pipeline_random_systems():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        A = random_hermitian(rng, n, kappa=rng.uniform(1.5, 5), complex_=bool(rng.integers(2)))
        prob = HermitianProblem.from_matrix(A, rng.standard_normal(n) + 1j * rng.standard_normal(n))
        p = _params(prob, T=4.0, R=3.0, n_p=7, Q=2, tau=0.25)
        g = p.grid()
        state, figs = lcu.emulate_pipeline(prob, g, FOURIER_ODD, p)
        x = solver.integrate_slice(prob, g, FOURIER_ODD, p)
        assert np.linalg.norm(state - x / np.linalg.norm(x)) <= 1e-10
        np.testing.assert_allclose(figs.stage_norms, 1.0, atol=1e-12)


def test_pipeline_dimension_cap(ns3x3):
    prob = solver.dilate(*ns3x3)
    p = _params(prob, T=10, R=15, n_p=16, Q=4, tau=0.1)
    with pytest.raises(ValueError):
        lcu.emulate_pipeline(prob, p.grid(), FOURIER_ODD, p)


def test_pipeline_needs_hermitian():
    from schrqlsp.evolution import DiagonalizableProblem, Eigensystem

    V = np.array([[1.0, 1.0], [0.0, 1.0]])
    eig = Eigensystem(np.array([1.0, 2.0]), V, np.linalg.inv(V), unitary=False)
    prob = DiagonalizableProblem(V @ np.diag([1.0, 2.0]) @ np.linalg.inv(V), np.ones(2), eig, norm=2.0, kappa=2.0)
    p = _params(prob, T=4.0, R=3.0, n_p=6, Q=1, tau=1.0)
    with pytest.raises(UnsupportedOperation):
        lcu.emulate_pipeline(prob, p.grid(), FOURIER_ODD, p)


def test_amplification_rounds_closed_form(rng):
    A = random_hermitian(rng, 4, kappa=5.0)
    b = rng.standard_normal(4)
    rep = solver.solve(A, b, 1e-6)
    f = rep.lcu
    xi = np.linalg.norm(np.linalg.solve(A, b)) / np.linalg.norm(b)
    assert f.xi == pytest.approx(xi, rel=1e-12)
    assert f.g == pytest.approx(rep.params.T * f.zeta_norm / xi, rel=0.01)


# --- zeta norm growth ------------------------------------------------------

@pytest.mark.parametrize("n_p", [7, 9, 11, 13])
def test_zeta_norm_growth(n_p):
    g = symmetric_grid(6.0, n_p)
    zn = lcu._zeta_grid_norm(g, FOURIER_ODD)
    dp = g.dp
    if dp <= 0.5:
        assert zn ** 2 * dp == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)
    assert zn <= math.sqrt(math.sqrt(math.pi) / 2 / dp) * (1 + 1e-6)


# --- query counts ----------------------------------------------------------

def test_query_counts_best_case():
    q = lcu.query_complexity(50.0, 1.0, 50.0, 1e-3)
    assert q.best_case
    assert q.block_queries == pytest.approx(50 * math.log(1e3) ** 1.5)
    assert q.linear_regime == pytest.approx(q.block_queries)


def test_query_counts_scaling():
    base = lcu.query_complexity(100.0, 1.0, 5.0, 1e-4)
    dbl = lcu.query_complexity(200.0, 1.0, 5.0, 1e-4)
    ratio = dbl.block_queries / base.block_queries
    assert 4 <= ratio <= 4 * (math.log(200 / 5e-4) / math.log(100 / 5e-4)) ** 1.5 + 1e-12
    fine = lcu.query_complexity(100.0, 1.0, 5.0, 1e-5)
    assert 1 < fine.block_queries / base.block_queries < 2
    assert not base.best_case and base.linear_regime is None


@pytest.mark.parametrize("args", [(0, 1, 1, 0.1), (10, 1, 1, 1.0), (10, 1, 20, 0.1), (10, -1, 1, 0.1)])
def test_query_counts_invalid(args):
    with pytest.raises(ValueError):
        lcu.query_complexity(*args)


@given(st.floats(1e-12, 0.3), st.floats(0.1, 3.0))
def test_eps_delta_inverse(eps, xi):
    if eps * xi >= 0.9:
        return
    d = lcu.delta_from_eps(eps, xi)
    assert lcu.eps_from_delta(d, xi) == pytest.approx(eps, rel=1e-9)
