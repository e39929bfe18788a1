"""Integration contours and quadrature rules for the resolvent calculus.

Three contour kinds:

* ``keyhole``     two rays hugging the negative real axis (arguments -pi
                  and +pi) joined by a circle of radius epsilon around 0;
* ``exponential`` rays at angle +-angle (measured from the positive real
                  axis, angle < pi/2) joined by the right-hand arc of the
                  epsilon circle;
* ``finite_loop`` a circle around ``center`` with ``radius``.

Orientation is calibrated so that

    (1/2 pi i) oint f(lambda) (a - lambda)^{-1} dlambda = + f(a)

for a point a enclosed by (for the open contours: to the right of) the
contour.  With the resolvent written as (A - lambda I)^{-1} this means the
contour winds clockwise around the spectrum; the finite loop is traversed
clockwise and the open contours run in along the lower ray, around the
small circle counterclockwise, and out along the upper ray.  Branch-cut
integrands evaluate with the per-node argument stored alongside the nodes
(lower keyhole ray: arg = -pi, upper ray: arg = +pi).

Quadrature: composite Gauss-Legendre panels, log-substituted on rays.
Closed loops use the periodic trapezoid rule (spectrally accurate there);
open arcs use Gauss-Legendre panels as well, because the branch jump at
the ray junctions would degrade the trapezoid rule to second order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "ContourSpec",
    "QuadratureSpec",
    "ContourNodes",
    "nodes_and_weights",
    "truncation_bound",
    "enclosure_margin",
]


@dataclass(frozen=True)
class ContourSpec:
    kind: str = "keyhole"
    epsilon: float = 0.5
    R: Optional[float] = None  # None: resolved from the integrand's decay
    angle: float = np.pi
    center: complex = 0.0 + 0.0j
    radius: float = 2.0

    def __post_init__(self):
        if self.kind not in ("keyhole", "exponential", "finite_loop"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.kind == "keyhole" and self.angle != np.pi:
            raise ValueError("keyhole rays sit at +-pi")
        if self.kind == "exponential" and not (0 < self.angle < np.pi / 2):
            raise ValueError("exponential contour needs 0 < angle < pi/2")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.R is not None and self.R <= self.epsilon:
            raise ValueError("need epsilon < R")

    def with_R(self, R: float) -> "ContourSpec":
        return ContourSpec(self.kind, self.epsilon, R, self.angle, self.center, self.radius)


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_ray: int = 200
    nodes_on_circle: int = 64
    rule: str = "gauss-legendre(log rays); trapezoid on closed loops"
    panel_order: int = 8

    def __post_init__(self):
        if self.nodes_per_ray < 8 or self.nodes_on_circle < 8:
            raise ValueError("need at least 8 nodes per segment")


@dataclass(frozen=True)
class ContourNodes:
    """Quadrature data: sum_k w_k g(lambda_k) approximates oint g dlambda."""

    lam: np.ndarray
    weights: np.ndarray
    args: np.ndarray  # branch argument carried by each node
    spec: ContourSpec

    def __len__(self):
        return len(self.lam)


def _gl_panels(a: float, b: float, n_nodes: int, order: int):
    """Composite Gauss-Legendre points/weights on [a, b] with >= n_nodes."""
    npan = max(1, int(np.ceil(n_nodes / order)))
    gx, gw = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, npan + 1)
    pts, wts = [], []
    for k in range(npan):
        lo, hi = edges[k], edges[k + 1]
        pts.append(0.5 * (lo + hi) + 0.5 * (hi - lo) * gx)
        wts.append(0.5 * (hi - lo) * gw)
    return np.concatenate(pts), np.concatenate(wts)


def nodes_and_weights(contour: ContourSpec, quad: QuadratureSpec) -> ContourNodes:
    """Generate nodes, weights and branch arguments for the contour."""
    if contour.kind == "finite_loop":
        M = quad.nodes_on_circle
        theta = 2.0 * np.pi * np.arange(M) / M
        lam = contour.center + contour.radius * np.exp(-1j * theta)  # clockwise
        w = -1j * contour.radius * np.exp(-1j * theta) * (2.0 * np.pi / M)
        return ContourNodes(lam, w, np.angle(lam), contour)

    if contour.R is None:
        raise ValueError("open contour needs a truncation radius R (see truncation_bound)")
    eps, R = contour.epsilon, contour.R
    phi = np.pi if contour.kind == "keyhole" else contour.angle

    u, du = _gl_panels(np.log(eps), np.log(R), quad.nodes_per_ray, quad.panel_order)
    r = np.exp(u)
    dr = du * r

    lam_parts, w_parts, arg_parts = [], [], []
    # inward along the lower ray at angle -phi
    lam_parts.append(r[::-1] * np.exp(-1j * phi))
    w_parts.append(-np.exp(-1j * phi) * dr[::-1])
    arg_parts.append(np.full(r.size, -phi))
    # counterclockwise arc joining the rays across the positive real axis
    theta, dth = _gl_panels(-phi, phi, quad.nodes_on_circle, quad.panel_order)
    lam_c = eps * np.exp(1j * theta)
    lam_parts.append(lam_c)
    w_parts.append(1j * lam_c * dth)
    arg_parts.append(theta)
    # outward along the upper ray at angle +phi
    lam_parts.append(r * np.exp(1j * phi))
    w_parts.append(np.exp(1j * phi) * dr)
    arg_parts.append(np.full(r.size, phi))

    return ContourNodes(
        np.concatenate(lam_parts),
        np.concatenate(w_parts),
        np.concatenate(arg_parts),
        contour,
    )


def truncation_bound(contour: ContourSpec, decay, tol: float) -> float:
    """Smallest ray-truncation radius R with the analytic tail below tol.

    decay: ("power", s) with s < 0 for |f| <= C |lambda|^s on the keyhole
    (tail bound R^s / |s|), or ("exp", t) with t > 0 for |f| = e^{-t Re
    lambda} on the exponential contour (tail bound e^{-t R cos(angle)} /
    (t cos(angle)); at the default angle pi/4 this matches the sin form).
    """
    kind, value = decay
    if kind == "power":
        s = float(value)
        if s >= 0:
            raise ValueError(
                "power decay needs s < 0 on the keyhole; split f = g . lambda^k first"
            )
        R = (abs(s) * tol) ** (1.0 / s)
    elif kind == "exp":
        t = float(value)
        if t <= 0:
            raise ValueError("exponential decay rate must be positive")
        rate = t * np.cos(contour.angle if contour.kind == "exponential" else 0.0)
        if rate <= 0:
            raise ValueError("contour rays must make an acute angle with the real axis")
        R = float(np.log(1.0 / (tol * rate)) / rate)
    else:
        raise ValueError(f"unknown decay descriptor {kind!r}")
    return float(max(R, 2.0 * contour.epsilon))


def tail_estimate(contour: ContourSpec, decay, R: float) -> float:
    """The analytic tail bound evaluated at radius R (for tests/reports)."""
    kind, value = decay
    if kind == "power":
        s = float(value)
        return R**s / abs(s)
    t = float(value)
    rate = t * np.cos(contour.angle if contour.kind == "exponential" else 0.0)
    return float(np.exp(-rate * R) / rate)


def enclosure_margin(contour: ContourSpec, points: np.ndarray) -> float:
    """Signed distance of points to the region the contour encloses.

    Positive: every point lies strictly inside the enclosed region (to the
    right of open contours / within the finite loop), at that distance
    from the boundary.
    """
    z = np.asarray(points, dtype=complex)
    if contour.kind == "finite_loop":
        return float(np.min(contour.radius - np.abs(z - contour.center)))
    if contour.kind == "keyhole":
        # enclosed region: off the cut (-inf, 0] and outside the eps ball
        dist_cut = np.where(z.real >= 0, np.abs(z), np.abs(z.imag))
        return float(np.min(np.minimum(np.abs(z) - contour.epsilon, dist_cut)))
    phi = contour.angle
    ang = np.abs(np.angle(z))
    dist_rays = np.abs(z) * np.sin(np.minimum(phi - ang, np.pi / 2))
    dist_rays = np.where(ang < phi, dist_rays, -np.abs(z) * np.sin(np.minimum(ang - phi, np.pi / 2)))
    return float(np.min(np.minimum(np.abs(z) - contour.epsilon, dist_rays)))
