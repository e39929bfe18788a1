import numpy as np
import pytest

import torusfc as tc
from torusfc.calculus import build_parametrix, fit_loglog_slope
from torusfc.contour import ContourSpec, QuadratureSpec
from torusfc.errors import BranchCutError, PreconditionError, SpectrumCollisionError
from torusfc.funcalc import eigenvector_condition, f_of_symbol_expansion, power_log
from torusfc.quantize import fourier_multiplier_matrix


def _multiplier_op(grid, values, tag="mult"):
    return tc.OperatorMatrix(grid, fourier_multiplier_matrix(grid, values), tag)


@pytest.mark.parametrize("f", [
    tc.power(-1.0), tc.power(0.3 + 0.2j), tc.exp_scaled(0.7), tc.log_fn(),
    tc.rational([1.0, 0.5], [1.0, 0.0, 2.0]),
])
def test_holo_derivatives_match_finite_differences(f, rng):
    # derivative evaluators vs central differences at 10 random points in
    # the right half-plane
    h = 1e-5
    for _ in range(10):
        w = complex(rng.uniform(1.0, 4.0), rng.uniform(-1.0, 1.0))
        for p in (1, 2):
            fd = (f.deriv_values(p - 1, w + h) - f.deriv_values(p - 1, w - h)) / (2 * h)
            assert abs(f.deriv_values(p, w) - fd) < 1e-6 * max(1.0, abs(fd))


def test_power_branch_arguments():
    f = tc.power(-0.5)
    up = f.evaluator(np.array([2.0]), np.array([np.pi]))
    dn = f.evaluator(np.array([2.0]), np.array([-np.pi]))
    assert abs(up - 2.0**-0.5 * np.exp(-0.5j * np.pi)) < 1e-14
    assert abs(dn - 2.0**-0.5 * np.exp(+0.5j * np.pi)) < 1e-14


def test_scalar_heat_value(g16):
    c = 2.0
    A = _multiplier_op(g16, np.full(g16.size, c))
    H = tc.heat_operator(A, 1.0)
    assert np.abs(H.entries - np.exp(-c) * np.eye(g16.size)).max() < 1e-8


def test_contour_inverse_is_bessel_multiplier(g16):
    A = tc.op_tau0(g16, tc.builtin_family("bessel_power", g16, m=2))
    Ainv = tc.f_of_A_contour(A, tc.power(-1.0), ContourSpec("keyhole"))
    expected = _multiplier_op(g16, tc.bessel_multiplier(g16, -2.0))
    assert tc.operator_norm(Ainv - expected) < 1e-7


def test_zero_order_identity_power(g16):
    z0 = tc.builtin_family("zero_order", g16, eps0=0.25)
    A = tc.op_tau0(g16, z0)
    loop = ContourSpec("finite_loop", center=1.0 + 0.0j, radius=0.6)
    back = tc.f_of_A_contour(A, tc.rational([1.0, 0.0], [1.0]), loop)
    assert tc.operator_norm(back - A) < 1e-8


def test_spectral_identity_map(g16, rng):
    s = tc.random_trig_symbol(g16, rng)
    A = tc.op_tau0(g16, s)
    out = tc.f_of_A_spectral(A, tc.rational([1.0, 0.0], [1.0]))
    assert np.abs(out.entries - A.entries).max() < 1e-12 * max(
        1.0, np.abs(A.entries).max()
    )
    assert eigenvector_condition(A) < 1e4


def test_spectral_log_of_diagonal(g16):
    vals = np.where(np.abs(g16.eta_mesh[0]) % 2 == 0, 1.0, 2.0)
    A = _multiplier_op(g16, vals)
    L = tc.f_of_A_spectral(A, tc.log_fn())
    expected = _multiplier_op(g16, np.log(vals))
    assert tc.operator_norm(L - expected) < 1e-10


def test_spectral_branch_cut_guard(g16):
    A = tc.OperatorMatrix(g16, -np.eye(g16.size), "-I")
    with pytest.raises(BranchCutError):
        tc.f_of_A_spectral(A, tc.log_fn())


def test_contour_spectrum_collision(g16):
    A = tc.OperatorMatrix(g16, 0.1 * np.eye(g16.size), "0.1 I")  # inside eps ball
    with pytest.raises(SpectrumCollisionError):
        tc.f_of_A_contour(A, tc.power(-1.0), ContourSpec("keyhole", epsilon=0.5, R=1e8))


def test_cross_method_perturbed(perturbed32):
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    C = tc.f_of_A_contour(A, tc.power(-0.5), ContourSpec("keyhole"))
    S = tc.f_of_A_spectral(A, tc.power(-0.5))
    rel = np.linalg.norm(C.entries - S.entries) / np.linalg.norm(S.entries)
    assert rel < 1e-6


def test_complex_power_identities(perturbed32):
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    I = np.eye(perturbed32.grid.size)
    P0 = tc.complex_power(A, 0.0)
    assert np.linalg.norm(P0.entries - I) / np.linalg.norm(I) < 1e-8
    P1 = tc.complex_power(A, 1.0)
    assert np.linalg.norm(P1.entries - A.entries) / np.linalg.norm(A.entries) < 1e-8


def test_complex_power_sqrt_multiplier(g16):
    A = tc.op_tau0(g16, tc.builtin_family("bessel_power", g16, m=2))
    half = tc.complex_power(A, 0.5)
    expected = _multiplier_op(g16, tc.bessel_multiplier(g16, 1.0))
    assert tc.operator_norm(half - expected) < 1e-7


def test_heat_small_time_is_identity(g16):
    A = tc.op_tau0(g16, tc.builtin_family("bessel_power", g16, m=2))
    H = tc.heat_operator(A, 1e-8)
    assert tc.operator_norm(H - tc.OperatorMatrix(g16, np.eye(g16.size), "I")) < 1e-6


def test_heat_bessel_multiplier(g16):
    A = tc.op_tau0(g16, tc.builtin_family("bessel_power", g16, m=2))
    H = tc.heat_operator(A, 1.0)
    expected = _multiplier_op(g16, np.exp(-g16.bracket**2))
    assert tc.operator_norm(H - expected) < 1e-8


def test_heat_semigroup(perturbed32):
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    H1 = tc.heat_operator(A, 0.3)
    H2 = tc.heat_operator(A, 0.5)
    H3 = tc.heat_operator(A, 0.8)
    assert tc.operator_norm(
        tc.OperatorMatrix(A.grid, H1.entries @ H2.entries, "") - H3
    ) < 1e-7


def test_heat_needs_positive_real(g16):
    A = tc.OperatorMatrix(g16, -np.eye(g16.size), "-I")
    with pytest.raises(PreconditionError):
        tc.heat_operator(A, 1.0)


def test_log_operator_identities(g16):
    I = tc.OperatorMatrix(g16, np.eye(g16.size), "I")
    loop = ContourSpec("finite_loop", center=1.0 + 0.0j, radius=0.5)
    L = tc.log_operator(I, loop)
    assert tc.operator_norm(L) < 1e-9
    twoI = tc.OperatorMatrix(g16, 2.0 * np.eye(g16.size), "2I")
    loop2 = ContourSpec("finite_loop", center=2.0 + 0.0j, radius=0.5)
    L2 = tc.log_operator(twoI, loop2)
    assert tc.operator_norm(L2 - tc.OperatorMatrix(g16, np.log(2.0) * np.eye(g16.size), "")) < 1e-9


def test_log_roundtrip_zero_order(g16):
    z0 = tc.builtin_family("zero_order", g16, eps0=0.25)
    A = tc.op_tau0(g16, z0)
    loop = ContourSpec("finite_loop", center=1.0 + 0.0j, radius=0.6)
    L = tc.log_operator(A, loop)
    ev, V = L.eigensystem()
    back = tc.OperatorMatrix(g16, (V * np.exp(ev)[None, :]) @ np.linalg.inv(V), "exp(log A)")
    assert tc.operator_norm(back - A) < 1e-7


def test_log_branch_cut_loop_rejected(g16):
    A = tc.OperatorMatrix(g16, np.eye(g16.size), "I")
    with pytest.raises(BranchCutError):
        tc.log_operator(A, ContourSpec("finite_loop", center=0.2 + 0.0j, radius=1.0))


def test_exp_growth_on_keyhole_rejected(g16):
    A = tc.op_tau0(g16, tc.builtin_family("bessel_power", g16, m=2))
    with pytest.raises(ValueError):
        tc.f_of_A_contour(A, tc.exp_scaled(1.0), ContourSpec("keyhole"))
    with pytest.raises(ValueError):
        tc.exp_scaled(-1.0)


def test_power_group_checks(perturbed32):
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    r0 = tc.power_group_check(A, 0.0, 0.0)
    assert r0["group_residual"] < 1e-10 and r0["inverse_residual"] < 1e-10
    r1 = tc.power_group_check(A, 0.5, 0.5)
    assert r1["group_residual"] < 1e-6
    r2 = tc.power_group_check(A, 0.3 + 0.2j, -0.3 - 0.2j)
    assert r2["inverse_residual"] < 1e-6


@pytest.mark.parametrize("name,kw", [
    ("bessel_power", dict(m=2.0)),
    ("laplace_plus_one", dict()),
    ("perturbed_elliptic", dict(m=2, rho=0.5, delta=0.0, eps0=0.25)),
])
def test_oracle_equivalence_families(name, kw):
    g = tc.TorusGrid(1, 32)
    A = tc.op_tau0(g, tc.builtin_family(name, g, **kw))
    for f, contour in [
        (tc.power(-1.0), ContourSpec("keyhole")),
        (tc.power(-0.5), ContourSpec("keyhole")),
        (tc.exp_scaled(1.0), ContourSpec("exponential", angle=np.pi / 4)),
    ]:
        C = tc.f_of_A_contour(A, f, contour)
        S = tc.f_of_A_spectral(A, f)
        rel = np.linalg.norm(C.entries - S.entries) / np.linalg.norm(S.entries)
        assert rel < 1e-6


def test_quadrature_convergence_factor(perturbed32):
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    S = tc.f_of_A_spectral(A, tc.power(-0.5))
    errs = []
    for n in (24, 48, 96):
        C = tc.f_of_A_contour(
            A, tc.power(-0.5), ContourSpec("keyhole"), QuadratureSpec(n, max(8, n // 3))
        )
        errs.append(np.linalg.norm(C.entries - S.entries) / np.linalg.norm(S.entries))
    for e0, e1 in zip(errs, errs[1:]):
        assert e1 < e0 / 4.0 or e1 < 1e-9


def test_order_calibration_slope(g32):
    # diagonal Fourier profile of f(A) decays like <eta>^{m Re z}
    A = tc.op_tau0(g32, tc.builtin_family("bessel_power", g32, m=2))
    z = -0.75
    F = tc.f_of_A_contour(A, tc.power(z), ContourSpec("keyhole"))
    prof = np.abs(tc.symbol_of_matrix(F).values[0, :])
    sel = g32.bracket >= 4.0
    slope = fit_loglog_slope(g32.bracket[sel], prof[sel])
    assert abs(slope - 2 * z) < 0.1


def test_expansion_improvement(perturbed32):
    px = build_parametrix(perturbed32, tc.SectorSpec(), K=2, J=2)
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    S = tc.f_of_A_spectral(A, tc.power(-1.0))
    gap0 = tc.operator_norm(
        tc.op_tau0(perturbed32.grid, f_of_symbol_expansion(px, tc.power(-1.0), 0)) - S
    )
    gap1 = tc.operator_norm(
        tc.op_tau0(perturbed32.grid, f_of_symbol_expansion(px, tc.power(-1.0), 1)) - S
    )
    assert gap1 < gap0


def test_expansion_x_independent_is_exact(g16):
    bp = tc.builtin_family("bessel_power", g16, m=2)
    px = build_parametrix(bp, tc.SectorSpec(), K=2, J=2)
    out = f_of_symbol_expansion(px, tc.power(-1.0))
    assert np.abs(out.samples.values - g16.bracket[None, :] ** -2).max() < 1e-12
    heat = f_of_symbol_expansion(px, tc.exp_scaled(0.5))
    assert np.abs(heat.samples.values - np.exp(-0.5 * g16.bracket[None, :] ** 2)).max() < 1e-12


def test_analyticity_derivative_in_z(perturbed32):
    # central difference of z -> A^z at z = -1 vs the contour with
    # f(lambda) = lambda^{-1} log(lambda)
    A = tc.op_tau0(perturbed32.grid, perturbed32)
    h = 1e-3
    Ap = tc.complex_power(A, -1.0 + h)
    Am = tc.complex_power(A, -1.0 - h)
    fd = (Ap.entries - Am.entries) / (2 * h)
    direct = tc.f_of_A_contour(A, power_log(-1.0), ContourSpec("keyhole"))
    assert np.abs(fd - direct.entries).max() < 1e-5


def test_negative_order_log_recovers_order(g32):
    # log(I + Op(a)) for an order -2 symbol: log(1+a) ~ a, so the diagonal
    # symbol profile decays with the original negative order, not order 0
    a = tc.builtin_family("negative_order", g32, norder=-2, eps0=0.25)
    IA = tc.OperatorMatrix(g32, np.eye(g32.size) + tc.op_tau0(g32, a).entries, "I+A")
    loop = ContourSpec("finite_loop", center=1.5 + 0.0j, radius=1.2)
    L = tc.log_operator(IA, loop)
    prof = np.abs(tc.symbol_of_matrix(L).values).max(axis=0)
    sel = g32.bracket >= 4.0
    slope = fit_loglog_slope(g32.bracket[sel], prof[sel])
    assert abs(slope - (-2.0)) < 0.1


def test_zero_order_log_expansion_route(g32):
    # zero-order route: any holomorphic f on the bounded spectrum;
    # the expansion corrections do not hurt and the leading gap is small
    z0 = tc.builtin_family("zero_order", g32, eps0=0.25)
    sec = tc.SectorSpec(variant="finite-disk", center=1.0 + 0.0j, radius=0.5)
    px = build_parametrix(z0, sec, K=2, J=2)
    A = tc.op_tau0(g32, z0)
    S = tc.f_of_A_spectral(A, tc.log_fn())
    gaps = [
        tc.operator_norm(tc.op_tau0(g32, f_of_symbol_expansion(px, tc.log_fn(), d)) - S)
        for d in (0, 1, 2)
    ]
    assert gaps[0] < 5e-3
    assert gaps[1] <= gaps[0]
    assert gaps[2] <= gaps[1] * (1 + 1e-6)


@pytest.mark.parametrize("name,kw", [
    ("constant", dict(c=1.0)),
    ("zero_order", dict(eps0=0.25)),
])
def test_oracle_equivalence_bounded_families(name, kw):
    # bounded spectra still clear the keyhole's epsilon ball, so the open
    # contour applies alongside the finite-loop route
    g = tc.TorusGrid(1, 32)
    A = tc.op_tau0(g, tc.builtin_family(name, g, **kw))
    for f, contour in [
        (tc.power(-1.0), ContourSpec("keyhole")),
        (tc.exp_scaled(1.0), ContourSpec("exponential", angle=np.pi / 4)),
    ]:
        C = tc.f_of_A_contour(A, f, contour)
        S = tc.f_of_A_spectral(A, f)
        rel = np.linalg.norm(C.entries - S.entries) / max(np.linalg.norm(S.entries), 1e-300)
        assert rel < 1e-6


def test_oracle_equivalence_negative_order_loop(g32):
    # negative orders have spectrum accumulating at 0+ inside the keyhole
    # ball; their calculus runs over a finite loop with f holomorphic on a
    # neighborhood of the (pinched) spectrum -- entire f here, since any
    # branch-respecting loop would be squeezed between the spectrum and
    # the cut
    a = tc.builtin_family("negative_order", g32, norder=-2, eps0=0.25)
    A = tc.op_tau0(g32, a)
    loop = ContourSpec("finite_loop", center=0.5 + 0.0j, radius=0.65)
    assert np.abs(A.eigenvalues() - loop.center).max() < loop.radius
    for f in (tc.exp_scaled(1.0), tc.rational([1.0], [1.0, 1.0])):
        C = tc.f_of_A_contour(A, f, loop)
        S = tc.f_of_A_spectral(A, f)
        rel = np.linalg.norm(C.entries - S.entries) / np.linalg.norm(S.entries)
        assert rel < 1e-6
