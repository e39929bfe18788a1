import numpy as np
import pytest

import torusfc as tc
from torusfc import laurent
from torusfc.calculus import (
    alias_band_projector,
    bessel_parameter_norm_check,
    build_parametrix,
    composition_remainder_norm,
    compose_symbols,
    parametrix_symbol_estimates,
    ray_minimal_growth_check,
    residual_decay_sweep,
)
from torusfc.errors import PreconditionError
from torusfc.symbols import EllipticityReport


def test_compose_x_independent_exact(g16):
    b1 = tc.builtin_family("bessel_power", g16, m=1)
    out = compose_symbols(b1, b1, 0)
    expected = g16.bracket[None, :] ** 2
    assert np.abs(out.samples.values - expected).max() < 1e-12
    assert out.class_spec.m == 2.0


def test_compose_with_unit(g16, rng):
    one = tc.builtin_family("constant", g16, c=1.0)
    b = tc.random_trig_symbol(g16, rng)
    out = compose_symbols(one, b, 2)
    assert np.abs(out.samples.values - b.samples.values).max() < 1e-10


def test_compose_polynomial_pair(g32):
    iota = tc.SymbolField(g32, tc.SymbolClassSpec(1.0), lambda xb, eb: 1j * eb[0] + 0.0 * xb[0])
    phase = tc.SymbolField(
        g32, tc.SymbolClassSpec(0.0), lambda xb, eb: np.exp(1j * xb[0]) + 0.0 * eb[0]
    )
    out = compose_symbols(iota, phase, 1)
    expected = 1j * (g32.eta_mesh[0][None, :] + 1) * np.exp(1j * g32.x_mesh[0][:, None])
    assert np.abs(out.samples.values - expected).max() < 1e-11
    # matrix-product oracle on the alias-free band
    P = alias_band_projector(g32, 1)
    lhs = tc.op_tau0(g32, out).entries @ P
    rhs = tc.op_tau0(g32, iota).entries @ tc.op_tau0(g32, phase).entries @ P
    assert np.abs(lhs - rhs).max() < 1e-10


def test_remainder_x_independent_zero(g16):
    b1 = tc.builtin_family("bessel_power", g16, m=1)
    assert composition_remainder_norm(b1, b1, 0) < 1e-10


def test_remainder_polynomial_pair_terminates(g32):
    iota = tc.SymbolField(g32, tc.SymbolClassSpec(1.0), lambda xb, eb: 1j * eb[0] + 0.0 * xb[0])
    phase = tc.SymbolField(
        g32, tc.SymbolClassSpec(0.0), lambda xb, eb: np.exp(1j * xb[0]) + 0.0 * eb[0]
    )
    assert composition_remainder_norm(iota, phase, 1) < 1e-10


def test_remainder_decreases_with_K(perturbed32):
    norms = [
        composition_remainder_norm(perturbed32, perturbed32, K) for K in (0, 1, 2)
    ]
    assert norms[1] < norms[0] and norms[2] < norms[1]


def test_parametrix_x_independent_is_pure_resolvent(g16):
    bp = tc.builtin_family("bessel_power", g16, m=2)
    px = build_parametrix(bp, tc.SectorSpec(), K=2, J=2)
    assert sorted(px.terms.coeffs) == [1]
    assert np.abs(px.terms.coeff_samples(1) - 1.0).max() < 1e-13
    assert not px.residual.coeffs  # residual identically zero
    sweep = residual_decay_sweep(px, [10.0, 100.0])
    assert max(sweep["residual_norms"]) < 1e-10


def test_parametrix_requires_certificate(perturbed32):
    bad = EllipticityReport(
        constant=np.inf,
        worst_lambda=0j,
        worst_eta=(0.0,),
        worst_x=(0.0,),
        order=2.0,
        sector=tc.SectorSpec(),
        passed=False,
    )
    with pytest.raises(PreconditionError):
        build_parametrix(perturbed32, tc.SectorSpec(), certificate=bad)


def test_parametrix_first_correction_size(perturbed32):
    px = build_parametrix(perturbed32, tc.SectorSpec(), K=1, J=1)
    lam = -10.0
    approx = laurent.eval_at(px.terms, lam).values
    direct = 1.0 / (perturbed32.samples.values - lam)
    # agreement within the measured size of the first correction itself
    correction = laurent.eval_at(px.terms_by_depth[1], lam).values
    gap = np.abs(approx - direct).max()
    assert gap <= np.abs(correction).max() + 1e-12


def test_parametrix_residual_lambda_free_vanishes(perturbed32):
    px = build_parametrix(perturbed32, tc.SectorSpec(), K=2, J=2)
    assert px.residual.lambda_free_sup() < 1e-12
    assert px.terms.min_pole_order >= 1


def test_residual_decay_depth_monotone(perturbed32):
    moduli = [10.0, 100.0, 1000.0, 10000.0]
    px11 = build_parametrix(perturbed32, tc.SectorSpec(), K=1, J=1)
    px22 = build_parametrix(perturbed32, tc.SectorSpec(), K=2, J=2)
    s11 = residual_decay_sweep(px11, moduli)
    s22 = residual_decay_sweep(px22, moduli)
    assert s22["slope"] <= -1.0
    assert s22["slope"] <= s11["slope"]
    assert s22["residual_norms"][-1] < s11["residual_norms"][-1]


def test_parametrix_estimates_scalar(g16):
    one = tc.builtin_family("constant", g16, c=1.0)
    sector = tc.SectorSpec()
    px = build_parametrix(one, sector, K=1, J=1)
    lam = -np.geomspace(0.5, 1e4, 30)
    rep = parametrix_symbol_estimates(px, lam, (0,), (0,))
    assert np.isfinite(rep[0]) and rep[0] <= 4.0
    assert np.isfinite(rep[1])


def test_parametrix_estimates_bessel_ray(g16):
    bp = tc.builtin_family("bessel_power", g16, m=2)
    px = build_parametrix(bp, tc.SectorSpec(), K=1, J=1)
    lam = -np.geomspace(0.5, 1e4, 40)
    rep = parametrix_symbol_estimates(px, lam, (0,), (0,))
    assert rep[0] <= 2.0 + 1e-9  # AM-GM bound along the ray


def test_parametrix_estimates_lambda_derivative(g16):
    # d_lambda (c - lambda)^{-1} = (c - lambda)^{-2} exactly in the algebra
    c = tc.builtin_family("constant", g16, c=2.0)
    P = laurent.from_resolvent(c)
    dP = laurent.deriv_lambda(P)
    lam = -1.5
    assert np.abs(
        laurent.eval_at(dP, lam).values - 1.0 / (2.0 - lam) ** 2
    ).max() < 1e-13


def test_parametrix_estimates_order_limit(perturbed32):
    px = build_parametrix(perturbed32, tc.SectorSpec(), K=1, J=1)
    with pytest.raises(ValueError):
        parametrix_symbol_estimates(px, [-10.0], (2,), (1,))


def test_ray_minimal_growth_identity(g16):
    I = tc.OperatorMatrix(g16, np.eye(g16.size), "I")
    chk = ray_minimal_growth_check(I, [1.0, 10.0, 100.0])
    assert all(p < 1.0 for p in chk["products"])
    assert abs(chk["products"][0] - 0.5) < 1e-12  # r/(1+r) at r=1


def test_ray_minimal_growth_bessel(g16):
    A = tc.op_tau0(g16, tc.builtin_family("bessel_power", g16, m=2))
    chk = ray_minimal_growth_check(A, np.geomspace(1, 1e4, 9))
    assert chk["max_product"] <= 1.0 + 1e-10


def test_ray_minimal_growth_perturbed(perturbed32):
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    chk = ray_minimal_growth_check(A, np.geomspace(1, 1e4, 9))
    assert chk["max_product"] <= 4.0


def test_bessel_parameter_operator_norm_exact(g16):
    # diagonal operator: H^s -> H^{s-l} norm equals the lattice sup exactly
    from torusfc.quantize import fourier_multiplier_matrix

    k, l, lam = -2.0, -1.0, 10.0 + 0.0j
    M = tc.OperatorMatrix(
        g16, fourier_multiplier_matrix(g16, tc.param_bessel_multiplier(g16, k, lam)), "B"
    )
    norm = tc.sobolev_operator_norm(M, 0.0, -l)
    rep = bessel_parameter_norm_check(g16, k, l, lam)
    assert abs(norm - rep["exact"]) < 1e-10 * max(rep["exact"], 1.0)
    assert rep["ok"]


@pytest.mark.parametrize("l", [0.0, -2.0])
def test_parametrix_operator_norm_bound(perturbed32, l):
    # || Op(a_sharp_lam) ||_{L^2 -> H^l} (1+|lam|^{1/m})^{min(m, l+m)} bounded
    m = perturbed32.class_spec.m
    px = build_parametrix(perturbed32, tc.SectorSpec(), K=2, J=2)
    vals = []
    for r in np.geomspace(10, 1e4, 7):
        P = px.operator_at(-r)
        nrm = tc.sobolev_operator_norm(P, 0.0, l)
        vals.append(nrm * (1.0 + r ** (1.0 / m)) ** min(m, l + m))
    assert max(vals) < 10.0
