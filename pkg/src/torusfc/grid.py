"""Discrete flat-torus geometry: grids, frequency lattices, transforms.

The torus is [0, 2pi)^n with N points per axis, x_j = 2*pi*j/N.  The
frequency lattice is the standard DFT set {-N/2, ..., N/2-1}^n kept in
natural (ascending) order; the unpaired mode -N/2 is retained.

Conventions
-----------
forward transform   u_hat(eta) = N^{-n} sum_j u(x_j) e^{-i x_j.eta}
inverse transform   u(x_j)     = sum_eta u_hat(eta) e^{+i x_j.eta}

A phase-space sample table ("grid field") is a complex array of shape
(N^n, N^n): rows indexed by the flattened x grid, columns by the
flattened eta lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ShapeError

__all__ = [
    "TorusGrid",
    "GridField",
    "dft_forward",
    "dft_inverse",
    "spectral_derivative_x",
    "finite_difference_eta",
    "bessel_multiplier",
    "param_bessel_multiplier",
    "japanese_bracket",
]


def japanese_bracket(*eta):
    """<eta> = (1 + |eta|^2)^(1/2) with the Euclidean weight."""
    s = sum(np.asarray(e, dtype=float) ** 2 for e in eta)
    return np.sqrt(1.0 + s)


@dataclass(frozen=True)
class TorusGrid:
    """Discretization of T^n (n = 1 or 2) with N points per axis.

    Immutable; derived arrays are cached properties and must be treated
    as read-only.
    """

    n: int
    N: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if self.N < 4 or self.N % 2 != 0:
            raise ValueError(f"N must be even and >= 4, got {self.N}")

    @property
    def size(self) -> int:
        return self.N**self.n

    @cached_property
    def x_axis(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.N) / self.N

    @cached_property
    def eta_axis(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2, dtype=float)

    @cached_property
    def x_mesh(self) -> tuple[np.ndarray, ...]:
        """Flattened spatial coordinates, one (size,) array per axis."""
        grids = np.meshgrid(*([self.x_axis] * self.n), indexing="ij")
        return tuple(g.ravel() for g in grids)

    @cached_property
    def eta_mesh(self) -> tuple[np.ndarray, ...]:
        """Flattened frequency coordinates, one (size,) array per axis."""
        grids = np.meshgrid(*([self.eta_axis] * self.n), indexing="ij")
        return tuple(g.ravel() for g in grids)

    @cached_property
    def eta_norm(self) -> np.ndarray:
        return np.sqrt(sum(e**2 for e in self.eta_mesh))

    @cached_property
    def bracket(self) -> np.ndarray:
        """<eta> on the flattened lattice."""
        return japanese_bracket(*self.eta_mesh)

    @cached_property
    def phase_matrix(self) -> np.ndarray:
        """E[j, l] = exp(i x_j . eta_l), shape (size, size)."""
        dot = np.zeros((self.size, self.size))
        for xc, ec in zip(self.x_mesh, self.eta_mesh):
            dot += np.outer(xc, ec)
        return np.exp(1j * dot)

    def mesh_broadcast(self):
        """(x columns, eta rows) reshaped for outer-product evaluation.

        Returns tuples of arrays shaped (size, 1) and (1, size) so that
        ``f(*xb, *eb)`` broadcasts to a full (size, size) field.
        """
        xb = tuple(c[:, None] for c in self.x_mesh)
        eb = tuple(c[None, :] for c in self.eta_mesh)
        return xb, eb

    def _check_point_shape(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        if u.size != self.size:
            raise ShapeError(f"expected {self.size} samples, got {u.size}")
        return u.reshape((self.N,) * self.n)


@dataclass(frozen=True)
class GridField:
    """Complex samples over the (x, eta) product grid, shape (N^n, N^n)."""

    grid: TorusGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.size, self.grid.size):
            raise ShapeError(
                f"grid field must have shape {(self.grid.size,) * 2}, got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ShapeError("grid field contains non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())


def _to_fft_order(axis_values: np.ndarray, N: int) -> np.ndarray:
    # natural order [-N/2 .. N/2-1] <-> numpy fft order [0 .. N/2-1, -N/2 .. -1]
    return np.fft.ifftshift(axis_values)


def dft_forward(grid: TorusGrid, u: np.ndarray) -> np.ndarray:
    """Forward transform; returns coefficients on the natural-order lattice."""
    cube = grid._check_point_shape(np.asarray(u, dtype=complex))
    hat = np.fft.fftn(cube) / grid.size
    for ax in range(grid.n):
        hat = np.fft.fftshift(hat, axes=ax)
    return hat.ravel()


def dft_inverse(grid: TorusGrid, u_hat: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft_forward`."""
    cube = grid._check_point_shape(np.asarray(u_hat, dtype=complex))
    for ax in range(grid.n):
        cube = np.fft.ifftshift(cube, axes=ax)
    return (np.fft.ifftn(cube) * grid.size).ravel()


def _derivative_on_axis(grid: TorusGrid, cube: np.ndarray, axis: int, order: int):
    freq = np.fft.ifftshift(grid.eta_axis)
    hat = np.fft.fft(cube, axis=axis)
    shape = [1] * cube.ndim
    shape[axis] = grid.N
    hat *= (1j * freq.reshape(shape)) ** order
    return np.fft.ifft(hat, axis=axis)


def spectral_derivative_x(grid: TorusGrid, f, axis: int = 0, order: int = 1):
    """Exact derivative of the trigonometric interpolant along one x axis.

    Accepts a grid function (N^n samples) or a :class:`GridField`; fields
    are differentiated per eta column.
    """
    if axis not in range(grid.n):
        raise ValueError(f"axis must be in 0..{grid.n - 1}, got {axis}")
    if isinstance(f, GridField):
        cube = f.values.reshape((grid.N,) * grid.n + (grid.size,))
        out = _derivative_on_axis(grid, cube, axis, order)
        return GridField(grid, out.reshape(grid.size, grid.size))
    cube = grid._check_point_shape(np.asarray(f, dtype=complex))
    return _derivative_on_axis(grid, cube, axis, order).ravel()


# 4th-order central stencils for first and second derivative
_FD1 = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))
_FD2 = ((-2, -1.0 / 12), (-1, 16.0 / 12), (0, -30.0 / 12), (1, 16.0 / 12), (2, -1.0 / 12))


def _fd_step(eta_axis_vals: np.ndarray) -> np.ndarray:
    return 1e-3 * np.maximum(1.0, np.abs(eta_axis_vals))


def _fd_eval(evaluate, xb, eb, alpha, axis_index=0):
    """Nested 4th-order central differences of evaluate in eta."""
    remaining = [(ax, k) for ax, k in enumerate(alpha) if k > 0]
    if not remaining:
        return evaluate(xb, eb)
    ax, k = remaining[0]
    rest = list(alpha)
    # peel one or two orders off this axis at a time
    take = 2 if k >= 2 else 1
    rest[ax] = k - take
    h = _fd_step(eb[ax])
    stencil = _FD2 if take == 2 else _FD1
    acc = None
    for off, w in stencil:
        shifted = list(eb)
        shifted[ax] = eb[ax] + off * h
        term = w * _fd_eval(evaluate, xb, tuple(shifted), tuple(rest))
        acc = term if acc is None else acc + term
    return acc / h**take


def finite_difference_eta(symbol, alpha) -> GridField:
    """d_eta^alpha of a symbol, sampled on the lattice.

    Uses the symbol's exact derivative callbacks when available, otherwise
    a 4th-order central difference with step h = 1e-3 * max(1, |eta|) per
    axis.  Pure finite differencing is limited to |alpha| <= 4.
    """
    grid = symbol.grid
    alpha = tuple(int(k) for k in np.atleast_1d(alpha))
    if len(alpha) != grid.n:
        raise ValueError(f"alpha must have {grid.n} components")
    if any(k < 0 for k in alpha):
        raise ValueError("alpha components must be >= 0")
    xb, eb = grid.mesh_broadcast()
    if symbol.has_exact_derivatives:
        vals = symbol.derivative_eval(alpha, (0,) * grid.n)(xb, eb)
    else:
        if sum(alpha) > 4:
            raise ValueError(
                "finite differences support |alpha| <= 4; provide exact callbacks"
            )
        vals = _fd_eval(lambda x, e: symbol.evaluator(x, e), xb, eb, alpha)
    return GridField(grid, np.broadcast_to(np.asarray(vals, complex), (grid.size, grid.size)).copy())


def bessel_multiplier(grid: TorusGrid, s: float) -> np.ndarray:
    """Diagonal Fourier multiplier <eta>^s on the lattice."""
    return grid.bracket**float(s)


def param_bessel_multiplier(grid: TorusGrid, k: float, lam: complex) -> np.ndarray:
    """Diagonal multiplier (|lambda|^{1/|k|} + <eta>)^k on the lattice."""
    if k == 0:
        raise ValueError("k must be nonzero")
    base = abs(lam) ** (1.0 / abs(k)) + grid.bracket
    return base**float(k)


def parseval_mismatch(grid: TorusGrid, u: np.ndarray) -> float:
    """Relative defect of sum|u|^2 = N^n sum|u_hat|^2 (diagnostic)."""
    lhs = float(np.sum(np.abs(np.asarray(u)) ** 2))
    rhs = grid.size * float(np.sum(np.abs(dft_forward(grid, u)) ** 2))
    return abs(lhs - rhs) / max(lhs, 1e-300)


def factorial(k: int) -> int:
    return math.factorial(k)
