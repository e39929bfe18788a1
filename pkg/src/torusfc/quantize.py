"""Dense matrix realizations of symbols on the grid (tau = 0 and tau = 1).

tau = 0:  (A u)(x_j) = sum_eta a(x_j, eta) u_hat(eta) e^{i x_j.eta}
tau = 1:  M[j, k] = N^{-n} sum_eta a(x_k, eta) e^{i (x_j - x_k).eta}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .grid import GridField, TorusGrid, bessel_multiplier, dft_forward
from .symbols import SymbolField

__all__ = [
    "OperatorMatrix",
    "op_tau0",
    "op_tau1",
    "apply_tau0",
    "operator_norm",
    "sobolev_operator_norm",
    "fourier_multiplier_matrix",
    "symbol_of_matrix",
]


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex operator on grid functions, with provenance tag."""

    grid: TorusGrid
    entries: np.ndarray = field(repr=False)
    provenance: str = ""

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (self.grid.size, self.grid.size):
            raise ValueError(f"operator must be {self.grid.size} x {self.grid.size}")
        if not np.all(np.isfinite(e)):
            raise ValueError("operator has non-finite entries")
        object.__setattr__(self, "entries", e)

    @cached_property
    def _eig(self):
        vals, vecs = np.linalg.eig(self.entries)
        return vals, vecs

    def eigenvalues(self) -> np.ndarray:
        return self._eig[0]

    def eigensystem(self):
        return self._eig

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, self.entries.conj().T, f"adjoint({self.provenance})")

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(
                self.grid, self.entries @ other.entries,
                f"({self.provenance})@({other.provenance})",
            )
        return self.entries @ other

    def __add__(self, other):
        other_e = other.entries if isinstance(other, OperatorMatrix) else other
        return OperatorMatrix(self.grid, self.entries + other_e, f"sum({self.provenance})")

    def __sub__(self, other):
        other_e = other.entries if isinstance(other, OperatorMatrix) else other
        return OperatorMatrix(self.grid, self.entries - other_e, f"diff({self.provenance})")

    def __mul__(self, scalar):
        return OperatorMatrix(self.grid, self.entries * scalar, f"scaled({self.provenance})")

    __rmul__ = __mul__


def _field_values(grid: TorusGrid, symbol) -> np.ndarray:
    if isinstance(symbol, SymbolField):
        return symbol.samples.values
    if isinstance(symbol, GridField):
        return symbol.values
    return np.broadcast_to(np.asarray(symbol, complex), (grid.size, grid.size))


def op_tau0(grid: TorusGrid, symbol, tag=None) -> OperatorMatrix:
    """Quantization with the symbol frozen at the output point x."""
    a = _field_values(grid, symbol)
    E = grid.phase_matrix
    M = (a * E) @ E.conj().T / grid.size
    name = tag or f"op_tau0({getattr(symbol, 'name', 'field')})"
    return OperatorMatrix(grid, M, name)


def op_tau1(grid: TorusGrid, symbol, tag=None) -> OperatorMatrix:
    """Quantization with the symbol frozen at the input point y."""
    a = _field_values(grid, symbol)
    E = grid.phase_matrix
    M = E @ (a * E.conj()).T / grid.size
    name = tag or f"op_tau1({getattr(symbol, 'name', 'field')})"
    return OperatorMatrix(grid, M, name)


def apply_tau0(grid: TorusGrid, symbol, u: np.ndarray) -> np.ndarray:
    """Direct Fourier-sum application of the tau=0 quantization to u."""
    a = _field_values(grid, symbol)
    u_hat = dft_forward(grid, u)
    E = grid.phase_matrix
    return (a * E) @ u_hat


def operator_norm(A) -> float:
    """L^2 -> L^2 norm: the largest singular value."""
    entries = getattr(A, "entries", A)
    return float(scipy.linalg.svdvals(np.asarray(entries))[0])


def fourier_multiplier_matrix(grid: TorusGrid, multiplier: np.ndarray) -> np.ndarray:
    """Dense matrix of a diagonal-in-frequency multiplier."""
    E = grid.phase_matrix
    return (E * np.asarray(multiplier, complex)[None, :]) @ E.conj().T / grid.size


def sobolev_operator_norm(A, s: float, t: float) -> float:
    """Discrete H^s -> H^t operator norm via Bessel conjugation."""
    grid = A.grid if isinstance(A, OperatorMatrix) else None
    if grid is None:
        raise TypeError("sobolev_operator_norm needs an OperatorMatrix")
    Bt = fourier_multiplier_matrix(grid, bessel_multiplier(grid, t))
    Bms = fourier_multiplier_matrix(grid, bessel_multiplier(grid, -s))
    return operator_norm(Bt @ A.entries @ Bms)


def symbol_of_matrix(A: OperatorMatrix) -> GridField:
    """tau=0 symbol table of a dense operator: sigma(x_j, eta) from rows."""
    E = A.grid.phase_matrix
    return GridField(A.grid, (A.entries @ E) * E.conj())
