import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schrqlsp.auxgrid import (
    apply_momentum,
    build_grid,
    evaluate_at,
    forward_coeffs,
    grid_with_zero,
    inverse_transform,
    momentum_norm,
    symmetric_grid,
)
from schrqlsp.errors import GridError


def test_small_grid_definitions():
    g = build_grid(-math.pi, math.pi, 2)
    np.testing.assert_allclose(g.points, [-math.pi, -math.pi / 2, 0.0, math.pi / 2])
    np.testing.assert_allclose(g.frequencies, [-2.0, -1.0, 0.0, 1.0])
    assert g.zero_index == 2
    assert momentum_norm(g) == 2.0


def test_reference_grid():
    g = symmetric_grid(15.0, 9)
    assert g.N_p == 512 and g.zero_index == 256
    assert g.dp == pytest.approx(30 * math.pi / 512)
    assert momentum_norm(g) == pytest.approx(256 / 15)
    assert momentum_norm(g) == pytest.approx(math.pi / g.dp)
    assert g.points[g.zero_index] == 0.0


def test_left_endpoint_zero():
    assert build_grid(0.0, 1.0, 1).zero_index == 0


def test_missing_zero():
    g = build_grid(-1.0, 2.0, 3)
    assert g.zero_index is None
    with pytest.raises(GridError):
        g.require_zero()


@pytest.mark.parametrize("a,b,n", [(1.0, 1.0, 3), (2.0, 1.0, 3), (0.0, 1.0, 0), (0.0, 1.0, 25), (0.0, math.inf, 3)])
def test_invalid_grids(a, b, n):
    with pytest.raises(ValueError):
        build_grid(a, b, n)


def test_momentum_norm_doubles():
    assert momentum_norm(build_grid(-3, 5, 7)) == pytest.approx(2 * momentum_norm(build_grid(-3, 5, 6)))


@given(st.floats(0.5, 300), st.floats(0.5, 300), st.integers(1, 14))
def test_grid_with_zero_contains_domain(L, R, n):
    g = grid_with_zero(L, R, n)
    k = g.require_zero()
    assert g.points[k] == 0.0
    assert g.a <= -L * (1 - 1e-12)
    assert g.b >= R * (1 - 1e-12)
    if math.floor(g.N_p * L / (L + R)) >= 1:
        assert g.a == pytest.approx(-L)


def test_constant_maps_to_zero_frequency():
    g = build_grid(-2.0, 3.0, 4)
    c = forward_coeffs(g, np.ones(g.N_p))
    expect = np.zeros(g.N_p)
    expect[g.N_p // 2] = 1
    np.testing.assert_allclose(c, expect, atol=1e-15)


def test_basis_identity():
    g = build_grid(-2.0, 3.0, 4)
    for l in (0, 3, 8, 15):
        e = np.zeros(g.N_p)
        e[l] = 1
        np.testing.assert_allclose(forward_coeffs(g, g.basis(l)), e, atol=1e-13)
        np.testing.assert_allclose(inverse_transform(g, e), g.basis(l), atol=1e-13)
    np.testing.assert_array_equal(inverse_transform(g, np.zeros(g.N_p)), 0)


@given(st.integers(1, 10), st.integers(0, 2**31 - 1))
def test_round_trip_and_parseval(n, seed):
    rng = np.random.default_rng(seed)
    g = build_grid(-1.3, 2.1, n)
    v = rng.standard_normal((g.N_p, 3)) + 1j * rng.standard_normal((g.N_p, 3))
    c = forward_coeffs(g, v)
    np.testing.assert_allclose(inverse_transform(g, c), v, rtol=1e-12, atol=1e-12)
    assert np.linalg.norm(v) ** 2 == pytest.approx(g.N_p * np.linalg.norm(c) ** 2, rel=1e-12)


def test_length_mismatch():
    g = build_grid(-1, 1, 3)
    with pytest.raises(ValueError):
        forward_coeffs(g, np.ones(5))
    with pytest.raises(ValueError):
        inverse_transform(g, np.ones(9))


def test_interpolant_reproduces_samples():
    g = build_grid(-4.0, 4.0, 5)
    v = np.exp(-g.points ** 2)
    c = forward_coeffs(g, v)
    for k in (0, 7, 16, 31):
        assert evaluate_at(g, c, g.points[k]) == pytest.approx(v[k], abs=1e-13)


def test_spectral_differentiation_converges_fast():
    c0 = 0.3
    errs = []
    for n in (5, 6, 7):
        g = build_grid(-12.0, 12.0, n)
        u = np.exp(-(g.points - c0) ** 2)
        du = -2 * (g.points - c0) * u
        errs.append(np.max(np.abs(apply_momentum(g, u) - (-1j) * du)))
    assert errs[2] < 1e-11
    # faster than any fixed power: each doubling gains far more than 2^4
    assert errs[1] / errs[0] < 1e-3
