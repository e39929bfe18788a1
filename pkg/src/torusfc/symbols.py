"""Symbol fields with order/class metadata and the built-in test families.

A symbol a(x, eta) is stored as an evaluator over broadcastable component
tuples plus cached lattice samples.  Built-in families are backed by sympy
expressions, which supplies exact derivative callbacks of any order; user
symbols fall back to 4th-order finite differences in eta and spectral
differentiation in x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .errors import DegenerateSampleError
from .grid import GridField, TorusGrid, _fd_eval

__all__ = [
    "SymbolClassSpec",
    "SymbolField",
    "SectorSpec",
    "EllipticityReport",
    "builtin_family",
    "random_trig_symbol",
    "seminorm_estimate",
    "parameter_ellipticity_check",
    "positive_real_check",
    "sector_samples",
]


@dataclass(frozen=True)
class SymbolClassSpec:
    """(m, rho, delta) class data; the flat-connection condition always holds."""

    m: float
    rho: float = 1.0
    delta: float = 0.0
    flat_connection: bool = True

    def __post_init__(self):
        if not (0.0 <= self.delta < self.rho <= 1.0):
            raise ValueError(
                f"need 0 <= delta < rho <= 1, got rho={self.rho}, delta={self.delta}"
            )

    @property
    def remainder_gain(self) -> float:
        """Order gained per composition-expansion term (flat case: rho - delta)."""
        return self.rho - self.delta


@dataclass(frozen=True)
class SectorSpec:
    """Complex sector Lambda = {|arg z| > theta0} plus an epsilon-ball at 0.

    variant selects the geometry the resolvent set is checked against:
    "keyhole" (rays hugging the negative axis), "right-half-plane" (the
    exponential contour's complement), or "finite-disk" (zero-order case,
    Lambda = exterior of a disk).
    """

    theta0: float = 3.0 * np.pi / 4.0
    epsilon: float = 0.5
    variant: str = "keyhole"
    center: complex = 0.0 + 0.0j
    radius: float = 2.0

    def __post_init__(self):
        if self.variant not in ("keyhole", "right-half-plane", "finite-disk"):
            raise ValueError(f"unknown sector variant {self.variant!r}")
        if self.variant == "keyhole" and not (np.pi / 2 < self.theta0 < np.pi):
            raise ValueError("keyhole sector needs pi/2 < theta0 < pi")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


class SymbolField:
    """A symbol with class metadata, evaluator, and derivative access."""

    def __init__(
        self,
        grid: TorusGrid,
        class_spec: SymbolClassSpec,
        evaluator,
        *,
        sympy_expr=None,
        derivative_callbacks=None,
        name: str = "symbol",
        samples: GridField | None = None,
    ):
        self.grid = grid
        self.class_spec = class_spec
        self.name = name
        self._expr = sympy_expr
        self._callbacks = dict(derivative_callbacks or {})
        self._lambdified = {}
        if sympy_expr is not None and evaluator is None:
            evaluator = self._lambdify((0,) * grid.n, (0,) * grid.n)
        if evaluator is None:
            raise ValueError("symbol needs an evaluator or a sympy expression")
        self.evaluator = evaluator
        if samples is not None:
            self.samples = samples
        else:
            xb, eb = grid.mesh_broadcast()
            vals = np.asarray(evaluator(xb, eb), dtype=complex)
            self.samples = GridField(grid, np.broadcast_to(vals, (grid.size, grid.size)).copy())

    # -- derivative machinery -------------------------------------------------

    @property
    def has_exact_derivatives(self) -> bool:
        return self._expr is not None or bool(self._callbacks)

    @staticmethod
    def _coordinates(n):
        xs = sp.symbols(f"x1:{n + 1}", real=True)
        es = sp.symbols(f"e1:{n + 1}", real=True)
        return xs, es

    def _lambdify(self, alpha, beta):
        key = (tuple(alpha), tuple(beta))
        if key in self._lambdified:
            return self._lambdified[key]
        n = self.grid.n
        xs, es = self._coordinates(n)
        expr = self._expr
        for ax in range(n):
            if beta[ax]:
                expr = sp.diff(expr, xs[ax], beta[ax])
            if alpha[ax]:
                expr = sp.diff(expr, es[ax], alpha[ax])
        f = sp.lambdify(xs + es, expr, "numpy")

        def call(xb, eb, _f=f):
            out = _f(*xb, *eb)
            return np.asarray(out, dtype=complex)

        self._lambdified[key] = call
        return call

    def derivative_eval(self, alpha, beta):
        """Callable for d_eta^alpha d_x^beta a over broadcast tuples.

        Exact when sympy-backed or when a matching callback exists; the
        fallback combines spectral x-derivatives (x on the full grid) with
        4th-order eta differences, limited to |alpha| <= 4.
        """
        alpha = tuple(int(k) for k in alpha)
        beta = tuple(int(k) for k in beta)
        if self._expr is not None:
            return self._lambdify(alpha, beta)
        if (alpha, beta) in self._callbacks:
            return self._callbacks[(alpha, beta)]
        if sum(alpha) > 4:
            raise ValueError("finite differences support |alpha| <= 4")

        grid = self.grid

        def call(xb, eb):
            def base(x, e):
                if any(b > 0 for b in beta):
                    return self._x_derivative_on_mesh(beta, e)
                return np.asarray(self.evaluator(x, e), dtype=complex)

            if sum(alpha) == 0:
                vals = base(xb, eb)
            else:
                vals = _fd_eval(base, xb, eb, alpha)
            return np.asarray(vals, dtype=complex)

        return call

    def _x_derivative_on_mesh(self, beta, eb):
        # evaluate on the full x mesh for the requested eta points, then
        # differentiate the trigonometric interpolant axis by axis
        grid = self.grid
        xb, _ = grid.mesh_broadcast()
        vals = np.broadcast_to(
            np.asarray(self.evaluator(xb, eb), dtype=complex),
            (grid.size, np.broadcast_shapes(*(e.shape for e in eb))[-1])
            if eb[0].ndim > 1
            else (grid.size, np.size(eb[0])),
        ).copy()
        cube = vals.reshape((grid.N,) * grid.n + (-1,))
        for ax, order in enumerate(beta):
            if order:
                from .grid import _derivative_on_axis

                cube = _derivative_on_axis(grid, cube, ax, order)
        return cube.reshape(grid.size, -1)

    def derivative_samples(self, alpha, beta) -> GridField:
        xb, eb = self.grid.mesh_broadcast()
        vals = self.derivative_eval(alpha, beta)(xb, eb)
        full = np.broadcast_to(np.asarray(vals, complex), (self.grid.size,) * 2)
        return GridField(self.grid, full.copy())

    def __repr__(self):
        cs = self.class_spec
        return f"SymbolField({self.name}, m={cs.m}, rho={cs.rho}, delta={cs.delta}, N={self.grid.N}^{self.grid.n})"


# -- built-in families ---------------------------------------------------------


def _bracket_expr(es):
    return sp.sqrt(1 + sum(e**2 for e in es))


def builtin_family(name: str, grid: TorusGrid, **params) -> SymbolField:
    """Construct one of the built-in parameter-elliptic families.

    Families: constant(c), bessel_power(m), laplace_plus_one,
    perturbed_elliptic(m, rho, delta, eps0), zero_order(eps0),
    negative_order(norder, eps0).  All carry exact derivatives.
    """
    xs, es = SymbolField._coordinates(grid.n)
    br = _bracket_expr(es)

    if name == "constant":
        c = params.pop("c", 1.0)
        expr = sp.sympify(c)
        spec = SymbolClassSpec(0.0)
    elif name == "bessel_power":
        m = float(params.pop("m"))
        expr = br**m
        spec = SymbolClassSpec(m)
    elif name == "laplace_plus_one":
        expr = 1 + sum(e**2 for e in es)
        spec = SymbolClassSpec(2.0)
    elif name == "perturbed_elliptic":
        m = float(params.pop("m", 2.0))
        rho = float(params.pop("rho", 0.5))
        delta = float(params.pop("delta", 0.0))
        eps0 = float(params.pop("eps0", 0.25))
        if abs(eps0) > 0.25:
            raise ValueError("eps0 must satisfy |eps0| <= 1/4 (positivity margin)")
        expr = br**m * (1 + eps0 * sp.sin(xs[0]) * sp.cos(br ** (1 - rho)))
        spec = SymbolClassSpec(m, rho, delta)
    elif name == "zero_order":
        eps0 = float(params.pop("eps0", 0.25))
        if abs(eps0) > 0.25:
            raise ValueError("eps0 must satisfy |eps0| <= 1/4 (positivity margin)")
        expr = 1 + eps0 * sp.sin(xs[0]) * sp.cos(br ** sp.Rational(1, 2))
        spec = SymbolClassSpec(0.0, rho=0.5)
    elif name == "negative_order":
        norder = float(params.pop("norder", -2.0))
        eps0 = float(params.pop("eps0", 0.25))
        if norder >= 0:
            raise ValueError("negative_order needs norder < 0")
        if abs(eps0) > 0.25:
            raise ValueError("eps0 must satisfy |eps0| <= 1/4 (positivity margin)")
        expr = br**norder * (1 + eps0 * sp.sin(xs[0]))
        spec = SymbolClassSpec(norder)
    else:
        raise ValueError(f"unknown builtin family {name!r}")
    if params:
        raise ValueError(f"unexpected parameters for {name}: {sorted(params)}")
    return SymbolField(grid, spec, None, sympy_expr=expr, name=name)


def random_trig_symbol(grid: TorusGrid, rng, x_modes: int = 2, decay_orders=(0, 1, 2)):
    """Random trig-polynomial symbol sum c_{kappa,p} e^{i kappa.x} <eta>^{-p}.

    Coefficients are complex standard normals scaled by 2^{-|kappa|-p}.
    Evaluated by a plain closure; eta derivatives fall back to finite
    differences when requested.
    """
    if grid.n == 1:
        kappas = [(k,) for k in range(-x_modes, x_modes + 1)]
    else:
        kappas = [
            (k1, k2)
            for k1 in range(-x_modes, x_modes + 1)
            for k2 in range(-x_modes, x_modes + 1)
        ]
    coeffs = {
        (kappa, p): (rng.standard_normal() + 1j * rng.standard_normal())
        * 0.5 ** (sum(map(abs, kappa)) + p)
        for kappa in kappas
        for p in decay_orders
    }

    def evaluator(xb, eb):
        from .grid import japanese_bracket

        br = japanese_bracket(*eb)
        out = None
        for (kappa, p), c in coeffs.items():
            phase = np.exp(1j * sum(k * x for k, x in zip(kappa, xb)))
            term = c * phase * br ** (-p)
            out = term if out is None else out + term
        return out

    return SymbolField(grid, SymbolClassSpec(0.0), evaluator, name="random_trig")


# -- numerical certificates -----------------------------------------------------


def seminorm_estimate(symbol: SymbolField, alpha, q, box=None) -> float:
    """sup over the grid of |d_eta^alpha d_x^q a| <eta>^{-(m + delta|q| - rho|alpha|)}.

    A finite value certifies the class inequality at grid resolution.  box
    optionally restricts x to a product of [lo, hi) intervals.
    """
    alpha = tuple(int(k) for k in np.atleast_1d(alpha))
    q = tuple(int(k) for k in np.atleast_1d(q))
    if sum(alpha) + sum(q) > 4 and not symbol.has_exact_derivatives:
        raise ValueError("derivative order above 4 needs exact callbacks")
    cs = symbol.class_spec
    vals = symbol.derivative_samples(alpha, q).values
    weight = symbol.grid.bracket ** (-(cs.m + cs.delta * sum(q) - cs.rho * sum(alpha)))
    field = np.abs(vals) * weight[None, :]
    if box is not None:
        mask = np.ones(symbol.grid.size, dtype=bool)
        for ax, (lo, hi) in enumerate(box):
            mask &= (symbol.grid.x_mesh[ax] >= lo) & (symbol.grid.x_mesh[ax] < hi)
        field = field[mask, :]
    return float(field.max())


def sector_samples(sector: SectorSpec, n_moduli: int = 40, n_angles: int = 9,
                   max_modulus: float = 1e4, n_circle: int = 16) -> np.ndarray:
    """Default lambda sampling: log-spaced moduli x sector angles + the
    epsilon-circle (finite-disk variant: the disk boundary and outside rays)."""
    eps = sector.epsilon
    moduli = np.geomspace(eps, max_modulus, n_moduli)
    if sector.variant == "finite-disk":
        circle = sector.center + sector.radius * np.exp(
            2j * np.pi * np.arange(n_circle) / n_circle
        )
        radial = np.concatenate(
            [
                sector.center + rm * np.exp(1j * th)
                for th in np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
                for rm in (np.geomspace(sector.radius * 1.0001, max_modulus, n_moduli),)
            ]
        )
        return np.concatenate([circle, radial])
    if sector.variant == "keyhole":
        lo = sector.theta0
    else:  # right-half-plane complement: |arg| > theta0 with theta0 < pi/2 allowed
        lo = sector.theta0
    angles = np.concatenate(
        [np.linspace(lo, np.pi, (n_angles + 1) // 2), -np.linspace(lo, np.pi, n_angles // 2)]
    )
    lams = (moduli[:, None] * np.exp(1j * angles[None, :])).ravel()
    circle = eps * np.exp(2j * np.pi * np.arange(n_circle) / n_circle)
    return np.concatenate([lams, circle])


@dataclass(frozen=True)
class EllipticityReport:
    constant: float
    worst_lambda: complex
    worst_eta: tuple
    worst_x: tuple
    order: float
    sector: SectorSpec
    passed: bool = True


def parameter_ellipticity_check(
    symbol: SymbolField,
    sector: SectorSpec,
    lam_samples=None,
    c_K: float = 1.0,
) -> EllipticityReport:
    """Numerical parameter-ellipticity certificate over sampled lambda.

    Returns the sup of |(a - lambda)^{-1}| / bound(lambda, eta) where the
    bound is (|lambda|^{1/m} + <eta>)^{-m} for m > 0 and (|lambda| + 1)^{-1}
    otherwise (orders <= 0 are checked against the zero-order bound).
    Samples with |lambda| + <eta> < c_K are skipped.
    """
    if lam_samples is None:
        lam_samples = sector_samples(sector)
    lam_samples = np.asarray(lam_samples, dtype=complex)
    grid = symbol.grid
    a = symbol.samples.values
    m = symbol.class_spec.m
    br = grid.bracket[None, :]
    worst = -np.inf
    worst_pt = (lam_samples[0], 0, 0)
    scale = max(np.abs(a).max(), 1.0)
    for lam in lam_samples:
        diff = a - lam
        bad = np.abs(diff) < 1e-14 * scale
        if bad.any():
            j, l = np.argwhere(bad)[0]
            x_pt = tuple(c[j] for c in grid.x_mesh)
            e_pt = tuple(c[l] for c in grid.eta_mesh)
            raise DegenerateSampleError(lam, x_pt, e_pt)
        if m > 0:
            bound = (abs(lam) ** (1.0 / m) + br) ** (-m)
        else:
            bound = 1.0 / (abs(lam) + 1.0)
        active = (abs(lam) + br) >= c_K
        ratio = np.where(active, 1.0 / (np.abs(diff) * bound), -np.inf)
        idx = np.argmax(ratio)
        val = ratio.ravel()[idx]
        if val > worst:
            worst = float(val)
            j, l = np.unravel_index(idx, ratio.shape)
            worst_pt = (lam, j, l)
    lam, j, l = worst_pt
    return EllipticityReport(
        constant=worst,
        worst_lambda=lam,
        worst_eta=tuple(c[l] for c in grid.eta_mesh),
        worst_x=tuple(c[j] for c in grid.x_mesh),
        order=m,
        sector=sector,
        passed=bool(np.isfinite(worst)),
    )


def hypoellipticity_check(symbol: SymbolField, m0: float | None = None,
                          c_K: float = 1.0, max_order: int = 2) -> dict:
    """Two-order (m, m0) lower-bound certificate: sup over <eta> >= c_K of
    |a|^{-1} <eta>^{m0} and of |d_eta^al d_x^q a| / (<eta>^{delta q - rho |al|} |a|)
    for |al| + |q| <= max_order.  m0 defaults to m (the elliptic case).

    Finite constants certify membership in the hypoelliptic class at grid
    resolution; built-ins use m0 = m, the general m0 is a config option.
    """
    cs = symbol.class_spec
    if m0 is None:
        m0 = cs.m
    grid = symbol.grid
    a = symbol.samples.values
    active = grid.bracket >= c_K
    if not active.any():
        raise ValueError("threshold c_K excludes the whole lattice")
    br = grid.bracket[None, :]
    inv_const = float((np.abs(a[:, active]) ** -1 * br[:, active] ** m0).max())
    ratio_const = 0.0
    n = grid.n
    for a_ord in range(max_order + 1):
        for q_ord in range(max_order + 1 - a_ord):
            if a_ord + q_ord == 0:
                continue
            alpha = (a_ord,) + (0,) * (n - 1)
            qq = (q_ord,) + (0,) * (n - 1)
            dv = symbol.derivative_samples(alpha, qq).values
            weight = br ** (cs.delta * q_ord - cs.rho * a_ord)
            ratio = np.abs(dv[:, active]) / (weight[:, active] * np.abs(a[:, active]))
            ratio_const = max(ratio_const, float(ratio.max()))
    finite = np.isfinite(inv_const) and np.isfinite(ratio_const)
    return {
        "m": cs.m,
        "m0": m0,
        "inverse_constant": inv_const,
        "derivative_constant": ratio_const,
        "passed": bool(finite),
    }


def positive_real_check(A, tol: float = 1e-10):
    """(is positive real, margin): min Re of the spectrum >= -tol.

    Accepts an OperatorMatrix or a plain square array.
    """
    entries = getattr(A, "entries", A)
    eig = getattr(A, "eigenvalues", None)
    vals = eig() if callable(eig) else np.linalg.eigvals(np.asarray(entries))
    margin = float(np.min(vals.real))
    return margin >= -tol, margin
