"""Trace functional on the discrete calculus and the three applications:
log-determinant of I + A, heat-trace sweeps, and spectral zeta values.

The discrete trace of Op(a) equals the phase-space average
N^{-n} sum_j sum_eta a(x_j, eta) exactly; this is the lattice form of the
trace formula (2 pi)^{-n} integral of the symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import laurent
from .calculus import ParametrixExpansion, build_parametrix, fit_loglog_slope
from .contour import ContourSpec, QuadratureSpec
from .errors import PreconditionError, TraceClassGateError
from .funcalc import complex_power, exp_scaled, log_fn, power, smoothstep_taper
from .grid import GridField
from .quantize import OperatorMatrix, op_tau0
from .symbols import SectorSpec, SymbolClassSpec, SymbolField

__all__ = [
    "TraceReport",
    "trace_symbol",
    "kernel_diagonal",
    "one_plus",
    "szego_logdet",
    "heat_trace_sweep",
    "zeta_value",
]


@dataclass
class TraceReport:
    kind: str
    operator_side: complex
    symbol_leading: complex
    symbol_by_depth: dict = dc_field(default_factory=dict)
    rows: list = dc_field(default_factory=list)
    slopes: dict = dc_field(default_factory=dict)
    extras: dict = dc_field(default_factory=dict)

    @property
    def symbol_side(self) -> complex:
        if self.symbol_by_depth:
            return self.symbol_by_depth[max(self.symbol_by_depth)]
        return self.symbol_leading

    @property
    def discrepancy(self) -> float:
        return abs(self.symbol_side - self.operator_side)

    @property
    def discrepancy_leading(self) -> float:
        return abs(self.symbol_leading - self.operator_side)


def trace_symbol(values) -> complex:
    """N^{-n} sum over the phase-space grid of the symbol samples."""
    if isinstance(values, SymbolField):
        grid, table = values.grid, values.samples.values
    elif isinstance(values, GridField):
        grid, table = values.grid, values.values
    else:
        raise TypeError("trace_symbol expects a SymbolField or GridField")
    nx = table.shape[0]
    return complex(table.sum() / nx)


def kernel_diagonal(symbol) -> np.ndarray:
    """x |-> N^{-n} sum_eta a(x, eta): the Schwartz-kernel diagonal, equal to
    the matrix diagonal of op_tau0(a)."""
    if isinstance(symbol, SymbolField):
        table = symbol.samples.values
    else:
        table = symbol.values
    return table.sum(axis=1) / table.shape[1]


def one_plus(a: SymbolField) -> SymbolField:
    """The symbol 1 + a (order max(m, 0) class metadata)."""
    spec = SymbolClassSpec(max(a.class_spec.m, 0.0), a.class_spec.rho, a.class_spec.delta)
    if a._expr is not None:
        import sympy as sp

        return SymbolField(a.grid, spec, None, sympy_expr=1 + a._expr, name=f"1+{a.name}")
    return SymbolField(
        a.grid, spec, lambda xb, eb: 1.0 + np.asarray(a.evaluator(xb, eb), complex),
        name=f"1+{a.name}",
    )


def _disk_sector_for(values: np.ndarray, pad: float = 1.3) -> SectorSpec:
    center = complex(values.mean())
    radius = float(np.abs(values - center).max()) * pad + 0.05
    return SectorSpec(variant="finite-disk", center=center, radius=radius)


def szego_logdet(
    a: SymbolField,
    K: int = 1,
    J: int = 2,
    taper: Optional[tuple] = None,
) -> TraceReport:
    """log det(I + Op(a)) both ways for a trace-class (order < -n) symbol.

    Operator side: sum of principal log(1 + mu_j) over the spectrum of
    Op(a), cross-checked against an LU determinant.  Symbol side: the
    phase-space average of log(1 + a) plus the expansion corrections
    generated by the Laurent engine for the base 1 + a.

    Trace comparisons average over x, which suppresses the oscillatory part
    of the low-frequency correction error, so no taper is applied by
    default (unlike the operator-norm route in funcalc).
    """
    grid = a.grid
    if not a.class_spec.m < -grid.n:
        raise TraceClassGateError(
            f"szego needs symbol order < -n = {-grid.n}, got {a.class_spec.m}"
        )
    A = op_tau0(grid, a)
    mu = A.eigenvalues()
    shifted = 1.0 + mu
    if np.min(np.abs(shifted)) < 1e-12:
        raise PreconditionError("determinant is zero: eigenvalue at -1")
    operator_side = complex(np.sum(np.log(shifted)))
    sign, logabs = np.linalg.slogdet(np.eye(grid.size) + A.entries)
    lu_oracle = complex(logabs + np.log(sign))

    b = one_plus(a)
    sector = _disk_sector_for(b.samples.values)
    px = build_parametrix(b, sector, K=K, J=J)
    taper_arr = None if taper is None else smoothstep_taper(grid, *taper)
    f = log_fn()
    by_depth = {}
    acc = 0.0 + 0.0j
    for d in range(J + 1):
        part = laurent.cauchy_apply(px.terms_by_depth[d], f, low_freq_taper=taper_arr)
        acc = acc + trace_symbol(part)
        by_depth[d] = acc
    return TraceReport(
        kind="szego",
        operator_side=operator_side,
        symbol_leading=by_depth[0],
        symbol_by_depth=by_depth,
        extras={
            "lu_oracle": lu_oracle,
            "lu_consistency": abs(operator_side - lu_oracle),
            "sector": sector,
        },
    )


def heat_trace_sweep(
    A: OperatorMatrix,
    px: ParametrixExpansion,
    t_list,
    correction_depth: int = 1,
    taper: Optional[tuple] = None,
) -> TraceReport:
    """tr e^{-tA} against the symbol-side heat expansion over a t sweep.

    Rows: (t, operator, leading, corrected, |disc lead|, |disc corr|);
    slopes: fitted log-log error orders for both columns.
    """
    from .symbols import positive_real_check

    ok, margin = positive_real_check(A)
    if not ok:
        raise PreconditionError(f"heat trace needs a positive-real operator (margin {margin:.2e})")
    grid = A.grid
    mu = A.eigenvalues()
    a_vals = px.base.samples.values
    taper_arr = None if taper is None else smoothstep_taper(grid, *taper)
    parts = px.terms_by_depth[: correction_depth + 1]
    rows = []
    for t in t_list:
        t = float(t)
        operator_side = float(np.sum(np.exp(-t * mu)).real)
        leading = float(np.sum(np.exp(-t * a_vals)).real / grid.size)
        f_t = exp_scaled(t)
        corrected = sum(
            trace_symbol(laurent.cauchy_apply(p_, f_t, low_freq_taper=taper_arr))
            for p_ in parts
        ).real
        rows.append(
            (
                t,
                operator_side,
                leading,
                corrected,
                abs(operator_side - leading),
                abs(operator_side - corrected),
            )
        )
    ts = [r[0] for r in rows]
    slopes = {
        "leading": fit_loglog_slope(ts, [r[4] for r in rows]),
        "corrected": fit_loglog_slope(ts, [r[5] for r in rows]),
    }
    last = rows[-1]
    return TraceReport(
        kind="heat",
        operator_side=last[1],
        symbol_leading=last[2],
        symbol_by_depth={correction_depth: last[3]},
        rows=rows,
        slopes=slopes,
        extras={"positive_real_margin": margin, "t_list": ts},
    )


def zeta_value(
    A: OperatorMatrix,
    px: ParametrixExpansion,
    z: complex,
    contour: ContourSpec = ContourSpec("keyhole"),
    quad: QuadratureSpec = QuadratureSpec(),
    taper: Optional[tuple] = None,
) -> TraceReport:
    """zeta(A, -z) = tr A^{-z} by eigenvalue sum, contour power trace, and
    the symbol formula (with the (2 pi)^{-n} trace prefactor).

    The trace-class gate Re(z) m > n is enforced.  The symbol formula
    carries the same (2 pi)^{-n} prefactor as the trace identity (the
    lattice forces it); the report also echoes the prefactor-free value
    for comparison with conventions that write the phase-space integral
    bare, and records the factor.
    """
    grid = A.grid
    m = px.base.class_spec.m
    z = complex(z)
    if not z.real * m > grid.n:
        raise TraceClassGateError(
            f"zeta needs Re(z).m > n: Re(z)={z.real}, m={m}, n={grid.n}"
        )
    mu = A.eigenvalues()
    dist_cut = np.where(mu.real >= 0, np.abs(mu), np.abs(mu.imag))
    if np.min(dist_cut) < 1e-12:
        raise PreconditionError("eigenvalue on the branch cut of lambda^{-z}")
    operator_side = complex(np.sum(np.exp(-z * np.log(mu))))
    contour_side = complex(np.trace(complex_power(A, -z, contour, quad).entries))
    taper_arr = None if taper is None else smoothstep_taper(grid, *taper)
    f = power(-z)
    by_depth = {}
    acc = 0.0 + 0.0j
    for d in range(px.J + 1):
        part = laurent.cauchy_apply(px.terms_by_depth[d], f, low_freq_taper=taper_arr)
        acc = acc + trace_symbol(part)
        by_depth[d] = acc
    symbol_side = by_depth[max(by_depth)]
    prefactor = (2.0 * np.pi) ** grid.n
    return TraceReport(
        kind="zeta",
        operator_side=operator_side,
        symbol_leading=by_depth[0],
        symbol_by_depth=by_depth,
        extras={
            "contour_side": contour_side,
            "prefactor_free_value": symbol_side * prefactor,
            "prefactor": prefactor,
            "z": z,
        },
    )
