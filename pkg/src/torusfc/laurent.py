"""Exact algebra of Laurent-in-resolvent symbols  sum_j c_j(x,eta) (a-lambda)^{-j}.

Coefficients are symbolic polynomials in derivatives of symbol fields:
each term is a complex scalar times a product of factors d_eta^al d_x^be s.
Like terms are merged on construction, which keeps the combinatorial
growth of the parametrix expansion in check; numeric samples of every
distinct factor are cached on the owning symbol.

Sign conventions (calibrated, see contour module):
    (1/2 pi i) oint f(lambda) (a - lambda)^{-j} dlambda
        = (-1)^{j+1} f^{(j-1)}(a) / (j-1)!
with the contour winding so that the j = 1 case gives +f(a).  The
alternating factor is forced by the residue theorem once that leading
case is fixed; tests assert agreement with the numeric quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .grid import GridField, TorusGrid
from .symbols import SymbolField

__all__ = [
    "CoefficientExpr",
    "ResolventPolynomial",
    "from_resolvent",
    "from_field",
    "unit",
    "multiply",
    "deriv_eta",
    "deriv_x",
    "deriv_lambda",
    "compose_truncated",
    "compose_with_base",
    "cauchy_apply",
    "eval_at",
    "multi_indices",
]


def multi_indices(n: int, max_total: int, min_total: int = 0):
    """Multi-indices alpha in N^n with min_total <= |alpha| <= max_total."""
    out = []
    for alpha in iter_product(range(max_total + 1), repeat=n):
        if min_total <= sum(alpha) <= max_total:
            out.append(alpha)
    return out


def _multi_factorial(alpha) -> int:
    out = 1
    for k in alpha:
        out *= math.factorial(k)
    return out


class CoefficientExpr:
    """Polynomial in derivative factors of symbols; immutable value object.

    terms: dict mapping a sorted tuple of factors to a complex scalar,
    factor = (symbol, alpha, beta).
    """

    __slots__ = ("terms",)

    def __init__(self, terms):
        merged = {}
        for key, s in terms.items():
            if s == 0:
                continue
            merged[key] = merged.get(key, 0.0) + s
        self.terms = {k: v for k, v in merged.items() if v != 0}

    @classmethod
    def const(cls, s) -> "CoefficientExpr":
        return cls({(): complex(s)})

    @classmethod
    def factor(cls, symbol: SymbolField, alpha, beta, scale=1.0) -> "CoefficientExpr":
        key = ((symbol, tuple(alpha), tuple(beta)),)
        return cls({key: complex(scale)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        merged = dict(self.terms)
        for k, v in other.terms.items():
            merged[k] = merged.get(k, 0.0) + v
        return CoefficientExpr(merged)

    def scale(self, s) -> "CoefficientExpr":
        if s == 0:
            return CoefficientExpr({})
        return CoefficientExpr({k: v * s for k, v in self.terms.items()})

    def __mul__(self, other):
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = tuple(sorted(k1 + k2, key=_factor_sort_key))
                out[key] = out.get(key, 0.0) + v1 * v2
        return CoefficientExpr(out)

    def deriv(self, axis: int, which: str) -> "CoefficientExpr":
        """d/d eta_axis (which='eta') or d/d x_axis (which='x') by product rule."""
        out = {}
        for key, s in self.terms.items():
            for i, (sym, alpha, beta) in enumerate(key):
                if which == "eta":
                    nf = (sym, _bump(alpha, axis), beta)
                else:
                    nf = (sym, alpha, _bump(beta, axis))
                nkey = tuple(sorted(key[:i] + (nf,) + key[i + 1:], key=_factor_sort_key))
                out[nkey] = out.get(nkey, 0.0) + s
        return CoefficientExpr(out)

    def sample(self, grid: TorusGrid) -> np.ndarray:
        tot = np.zeros((grid.size, grid.size), dtype=complex)
        for key, s in self.terms.items():
            v = np.full((grid.size, grid.size), s, dtype=complex)
            for sym, alpha, beta in key:
                v = v * _cached_derivative(sym, alpha, beta)
            tot += v
        return tot

    def __repr__(self):
        return f"CoefficientExpr({len(self.terms)} terms)"


def _bump(idx, axis):
    lst = list(idx)
    lst[axis] += 1
    return tuple(lst)


def _factor_sort_key(factor):
    sym, alpha, beta = factor
    return (id(sym), alpha, beta)


def _cached_derivative(symbol: SymbolField, alpha, beta) -> np.ndarray:
    cache = getattr(symbol, "_deriv_sample_cache", None)
    if cache is None:
        cache = {}
        symbol._deriv_sample_cache = cache
    key = (tuple(alpha), tuple(beta))
    if key not in cache:
        cache[key] = symbol.derivative_samples(alpha, beta).values
    return cache[key]


@dataclass(frozen=True)
class ResolventPolynomial:
    """Finite sum over pole orders j >= 0 of c_j(x,eta) (a(x,eta)-lambda)^{-j}."""

    base: SymbolField
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(j): c for j, c in self.coeffs.items() if not c.is_zero}
        if any(j < 0 for j in clean):
            raise ValueError("pole orders must be >= 0")
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "_coeff_cache", {})

    def coeff_samples(self, j: int) -> np.ndarray:
        """Sampled coefficient field, cached per pole order."""
        if j not in self._coeff_cache:
            self._coeff_cache[j] = self.coeffs[j].sample(self.grid)
        return self._coeff_cache[j]

    @property
    def grid(self) -> TorusGrid:
        return self.base.grid

    @property
    def max_pole_order(self) -> int:
        return max(self.coeffs, default=0)

    @property
    def min_pole_order(self) -> int:
        return min(self.coeffs, default=0)

    def coefficient_field(self, j: int) -> GridField:
        c = self.coeffs.get(j)
        if c is None:
            return GridField(self.grid, np.zeros((self.grid.size,) * 2, complex))
        return GridField(self.grid, self.coeff_samples(j))

    def lambda_free_sup(self) -> float:
        return self.coefficient_field(0).sup_norm

    def prune_small(self, tol: float = 1e-14) -> "ResolventPolynomial":
        """Drop coefficient fields whose lattice sup-norm is below tol."""
        kept = {
            j: c
            for j, c in self.coeffs.items()
            if np.abs(self.coeff_samples(j)).max() >= tol
        }
        return ResolventPolynomial(self.base, kept)

    def __add__(self, other):
        _check_same_base(self, other)
        merged = dict(self.coeffs)
        for j, c in other.coeffs.items():
            merged[j] = merged[j] + c if j in merged else c
        return ResolventPolynomial(self.base, merged)

    def scale(self, s) -> "ResolventPolynomial":
        return ResolventPolynomial(self.base, {j: c.scale(s) for j, c in self.coeffs.items()})


def _check_same_base(P: ResolventPolynomial, Q: ResolventPolynomial):
    if P.base is not Q.base:
        raise ValueError("operands must share the same base symbol")


def from_resolvent(base: SymbolField) -> ResolventPolynomial:
    """(a - lambda)^{-1} as a polynomial (the cutoff is identically one)."""
    return ResolventPolynomial(base, {1: CoefficientExpr.const(1.0)})


def unit(base: SymbolField) -> ResolventPolynomial:
    return ResolventPolynomial(base, {0: CoefficientExpr.const(1.0)})


def from_field(base: SymbolField, symbol: SymbolField, scale=1.0) -> ResolventPolynomial:
    """A lambda-free polynomial whose single coefficient is another symbol."""
    return ResolventPolynomial(
        base, {0: CoefficientExpr.factor(symbol, (0,) * base.grid.n, (0,) * base.grid.n, scale)}
    )


def multiply(P: ResolventPolynomial, Q: ResolventPolynomial) -> ResolventPolynomial:
    """Pointwise product; pole orders add."""
    _check_same_base(P, Q)
    out = {}
    for j, cj in P.coeffs.items():
        for k, ck in Q.coeffs.items():
            prod = cj * ck
            out[j + k] = out[j + k] + prod if j + k in out else prod
    return ResolventPolynomial(P.base, out)


def _deriv(P: ResolventPolynomial, axis: int, which: str) -> ResolventPolynomial:
    n = P.grid.n
    if axis not in range(n):
        raise ValueError(f"axis must be in 0..{n - 1}")
    e_ax = tuple(1 if i == axis else 0 for i in range(n))
    zero = (0,) * n
    out = {}
    for j, c in P.coeffs.items():
        dc = c.deriv(axis, which)
        if not dc.is_zero:
            out[j] = out[j] + dc if j in out else dc
        if j >= 1:
            # d (a-lambda)^{-j} = -j (a-lambda)^{-j-1} * (d a)
            da = (
                CoefficientExpr.factor(P.base, e_ax, zero)
                if which == "eta"
                else CoefficientExpr.factor(P.base, zero, e_ax)
            )
            extra = (c * da).scale(-j)
            out[j + 1] = out[j + 1] + extra if j + 1 in out else extra
    return ResolventPolynomial(P.base, out)


def deriv_eta(P: ResolventPolynomial, axis: int = 0) -> ResolventPolynomial:
    return _deriv(P, axis, "eta")


def deriv_x(P: ResolventPolynomial, axis: int = 0) -> ResolventPolynomial:
    return _deriv(P, axis, "x")


def deriv_lambda(P: ResolventPolynomial) -> ResolventPolynomial:
    """d/d lambda: (a - lambda)^{-j} -> j (a - lambda)^{-j-1}."""
    out = {}
    for j, c in P.coeffs.items():
        if j >= 1:
            out[j + 1] = c.scale(j)
    return ResolventPolynomial(P.base, out)


def _deriv_multi(P: ResolventPolynomial, alpha, which: str) -> ResolventPolynomial:
    out = P
    for axis, k in enumerate(alpha):
        for _ in range(k):
            out = _deriv(out, axis, which)
    return out


def compose_truncated(P: ResolventPolynomial, Q: ResolventPolynomial, K: int) -> ResolventPolynomial:
    """Symbol composition truncated at |alpha| <= K:

        P # Q = sum_{|alpha| <= K} (1/alpha!) d_eta^alpha P . D_x^alpha Q,

    with D_x = -i d_x; P plays the left-operator role.
    """
    if K > 3:
        raise ValueError("composition truncation supports K <= 3")
    _check_same_base(P, Q)
    n = P.grid.n
    total = None
    for alpha in multi_indices(n, K):
        dP = _deriv_multi(P, alpha, "eta")
        DQ = _deriv_multi(Q, alpha, "x").scale((-1j) ** sum(alpha))
        term = multiply(dP, DQ).scale(1.0 / _multi_factorial(alpha))
        total = term if total is None else total + term
    return total


def compose_with_base(P: ResolventPolynomial, K: int) -> ResolventPolynomial:
    """P # (a - lambda): the shift c_j -> pole j-1 plus derivative terms.

    Requires min pole order >= 1 so the result stays in the j >= 0 algebra.
    """
    if K > 3:
        raise ValueError("composition truncation supports K <= 3")
    if P.coeffs and P.min_pole_order < 1:
        raise ValueError("compose_with_base needs min pole order >= 1")
    n = P.grid.n
    zero = (0,) * n
    shifted = {j - 1: c for j, c in P.coeffs.items()}
    total = ResolventPolynomial(P.base, shifted)
    for alpha in multi_indices(n, K, min_total=1):
        dP = _deriv_multi(P, alpha, "eta")
        beta = tuple(alpha)
        dxa = CoefficientExpr.factor(P.base, zero, beta, (-1j) ** sum(alpha))
        term = ResolventPolynomial(P.base, {0: dxa})
        total = total + multiply(dP, term).scale(1.0 / _multi_factorial(alpha))
    return total


def eval_at(P: ResolventPolynomial, lam: complex) -> GridField:
    """Pointwise evaluation sum_j c_j (a - lambda)^{-j} on the lattice."""
    a = P.base.samples.values
    S = 1.0 / (a - lam)
    tot = np.zeros_like(a)
    for j in P.coeffs:
        tot += P.coeff_samples(j) * S**j
    return GridField(P.grid, tot)


def cauchy_apply(P: ResolventPolynomial, f_derivs, low_freq_taper=None) -> GridField:
    """Termwise Cauchy integral of f(lambda) against P over the calibrated contour.

    f_derivs: callable p -> callable(values) giving f^{(p)} pointwise, or an
    object with a ``deriv_values(p, values)`` method (HoloFunction).  The
    lambda-free part integrates to zero and is skipped.

    low_freq_taper: optional array over the eta lattice in [0, 1] applied to
    the pole orders >= 2 (the asymptotic corrections); the leading j = 1
    term is never tapered.
    """
    a = P.base.samples.values
    tot = np.zeros_like(a)
    for j, c in sorted(P.coeffs.items()):
        if j == 0:
            continue
        if hasattr(f_derivs, "deriv_values"):
            fd = f_derivs.deriv_values(j - 1, a)
        else:
            fd = f_derivs(j - 1)
            fd = fd(a) if callable(fd) else fd
        term = P.coeff_samples(j) * ((-1.0) ** (j + 1)) * fd / math.factorial(j - 1)
        if low_freq_taper is not None and j >= 2:
            term = term * np.asarray(low_freq_taper)[None, :]
        tot += term
    return GridField(P.grid, tot)
