import numpy as np
import pytest

import torusfc as tc
from torusfc.errors import ShapeError
from torusfc.grid import finite_difference_eta, japanese_bracket, parseval_mismatch


def test_grid_validation():
    with pytest.raises(ValueError):
        tc.TorusGrid(3, 8)
    with pytest.raises(ValueError):
        tc.TorusGrid(1, 7)
    with pytest.raises(ValueError):
        tc.TorusGrid(1, 2)


def test_lattice_layout(g16):
    assert g16.eta_axis[0] == -8 and g16.eta_axis[-1] == 7
    assert np.allclose(g16.x_axis, 2 * np.pi * np.arange(16) / 16)


def test_dft_constant(g16):
    u = np.ones(16)
    hat = tc.dft_forward(g16, u)
    expected = np.zeros(16, complex)
    expected[np.where(g16.eta_axis == 0)[0][0]] = 1.0
    assert np.abs(hat - expected).max() < 1e-14


def test_dft_pure_mode(g16):
    u = np.exp(1j * g16.x_axis)
    hat = tc.dft_forward(g16, u)
    idx = np.where(g16.eta_axis == 1)[0][0]
    assert abs(hat[idx] - 1.0) < 1e-14
    hat[idx] = 0.0
    assert np.abs(hat).max() < 1e-14


def test_dft_roundtrip(g16, rng):
    u = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    back = tc.dft_inverse(g16, tc.dft_forward(g16, u))
    assert np.abs(back - u).max() / np.abs(u).max() < 1e-12


def test_dft_roundtrip_2d(g2d8, rng):
    u = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    back = tc.dft_inverse(g2d8, tc.dft_forward(g2d8, u))
    assert np.abs(back - u).max() / np.abs(u).max() < 1e-12


def test_dft_shape_error(g16):
    with pytest.raises(ShapeError):
        tc.dft_forward(g16, np.ones(15))


@pytest.mark.parametrize("n,N", [(1, 16), (1, 32), (2, 8)])
def test_parseval_random(n, N, rng):
    g = tc.TorusGrid(n, N)
    for _ in range(100):
        u = rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size)
        assert parseval_mismatch(g, u) < 1e-10


def test_spectral_derivative_sin(g16):
    f = np.sin(g16.x_axis)
    df = tc.spectral_derivative_x(g16, f, axis=0, order=1)
    assert np.abs(df - np.cos(g16.x_axis)).max() < 1e-12


def test_spectral_derivative_constant(g16):
    df = tc.spectral_derivative_x(g16, np.full(16, 3.7), axis=0, order=1)
    assert np.abs(df).max() < 1e-12


def test_spectral_derivative_second_order(g16):
    f = np.exp(2j * g16.x_axis)
    d2 = tc.spectral_derivative_x(g16, f, axis=0, order=2)
    assert np.abs(d2 + 4 * f).max() < 1e-11


def test_spectral_derivative_invalid_axis(g16):
    with pytest.raises(ValueError):
        tc.spectral_derivative_x(g16, np.ones(16), axis=1)


def test_derivative_commutes_with_dft(g16, rng):
    # transform of derivative = i eta * transform on band-limited input
    u = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    lhs = tc.dft_forward(g16, tc.spectral_derivative_x(g16, u))
    rhs = 1j * g16.eta_axis * tc.dft_forward(g16, u)
    assert np.abs(lhs - rhs).max() < 1e-11


def test_gridfield_per_column_derivative(g16):
    vals = np.exp(1j * g16.x_axis)[:, None] * (1.0 + g16.eta_axis**2)[None, :]
    fld = tc.GridField(g16, vals)
    out = tc.spectral_derivative_x(g16, fld, axis=0, order=1)
    assert np.abs(out.values - 1j * vals).max() < 1e-10


def test_fd_eta_polynomial(g16):
    s = tc.builtin_family("laplace_plus_one", tc.TorusGrid(1, 16))
    fld = finite_difference_eta(s, (1,))
    idx = np.where(g16.eta_axis == 3)[0][0]
    assert abs(fld.values[0, idx] - 6.0) < 1e-8


def test_fd_eta_constant(g16):
    s = tc.builtin_family("constant", g16, c=4.0)
    fld = finite_difference_eta(s, (2,))
    assert fld.sup_norm < 1e-10


def test_fd_eta_bracket_second_derivative(g16):
    # d^2/d eta^2 sqrt(1+eta^2) at 0 equals 1; force the finite-difference
    # path with a callback-free symbol
    s = tc.SymbolField(
        g16, tc.SymbolClassSpec(1.0), lambda xb, eb: japanese_bracket(*eb) + 0.0 * xb[0]
    )
    fld = finite_difference_eta(s, (2,))
    idx = np.where(g16.eta_axis == 0)[0][0]
    assert abs(fld.values[0, idx] - 1.0) < 1e-6


def test_fd_eta_order_limit(g16):
    s = tc.SymbolField(
        g16, tc.SymbolClassSpec(1.0), lambda xb, eb: japanese_bracket(*eb) + 0.0 * xb[0]
    )
    with pytest.raises(ValueError):
        finite_difference_eta(s, (5,))


def test_bessel_multiplier_values(g16):
    assert np.allclose(tc.bessel_multiplier(g16, 0.0), 1.0)
    vals = tc.bessel_multiplier(g16, 2.0)
    idx = np.where(g16.eta_axis == 1)[0][0]
    assert abs(vals[idx] - 2.0) < 1e-14
    valsm = tc.bessel_multiplier(g16, -1.0)
    idx2 = np.where(g16.eta_axis == 2)[0][0]
    assert abs(valsm[idx2] - 5.0**-0.5) < 1e-14


def test_bessel_multiplier_inverse_pair(g16):
    prod = tc.bessel_multiplier(g16, 1.7) * tc.bessel_multiplier(g16, -1.7)
    assert np.abs(prod - 1.0).max() < 1e-12


def test_param_bessel_values(g16):
    assert abs(tc.param_bessel_multiplier(g16, 1.0, 0.0)[g16.N // 2] - 1.0) < 1e-14
    assert abs(tc.param_bessel_multiplier(g16, 2.0, 16.0)[g16.N // 2] - 25.0) < 1e-12


def test_param_bessel_zero_lambda_exact(g16):
    for k in (-2.0, 1.0, 3.0):
        assert np.array_equal(
            tc.param_bessel_multiplier(g16, k, 0.0), tc.bessel_multiplier(g16, k)
        )


def test_param_bessel_k_zero_rejected(g16):
    with pytest.raises(ValueError):
        tc.param_bessel_multiplier(g16, 0.0, 1.0)


@pytest.mark.parametrize("lam", [1.0, 10.0, 100.0])
def test_param_bessel_lemma_bound(g16, lam):
    # sup over the lattice of (|lam|^{1/|k|}+<eta>)^k <eta>^{-l} for
    # (k, l) = (-2, -1) obeys the two-case bound with C <= 2^{|k|}
    k, l = -2.0, -1.0
    vals = tc.param_bessel_multiplier(g16, k, lam) * tc.bessel_multiplier(g16, -l)
    sup = np.abs(vals).max()
    bound = 2.0 ** abs(k) * (1.0 + lam ** (1.0 / abs(k))) ** (k - l)
    assert sup <= bound


def test_gridfield_derivative_2d(g2d8):
    x1 = g2d8.x_mesh[0][:, None]
    x2 = g2d8.x_mesh[1][:, None]
    vals = np.exp(1j * x2) * np.cos(x1) * np.ones((1, g2d8.size))
    fld = tc.GridField(g2d8, vals)
    d1 = tc.spectral_derivative_x(g2d8, fld, axis=1, order=1)
    assert np.abs(d1.values - 1j * vals).max() < 1e-10
    d0 = tc.spectral_derivative_x(g2d8, fld, axis=0, order=2)
    assert np.abs(d0.values + vals).max() < 1e-10
