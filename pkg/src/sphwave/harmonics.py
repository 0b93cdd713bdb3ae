"""Spherical geometry, the sector family of hyperspherical harmonics, and
Gegenbauer coefficient extraction.

Only the sector of harmonics indexed by (l, k1) -- the members depending on the
first two angles alone -- is represented: rotational derivatives of zonal
functions never leave it.  On the 2-sphere the basis is the real combination
``Yt_l^k = Y_l^{-k} + Y_l^k``; the zonal member is taken as ``Yt_l^0 = Y_l^0``
(no doubling), so coefficient fields are real in every dimension.  The k >= 1
members then carry squared norm 2, a weight made explicit in all inner-product
code (see :func:`sphwave.rotderiv.sector_weights`).

Scalar products follow the global convention <f, g> = (1/sigma_n) * integral.
All functions are pure; grids and points are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .special import LambdaParam, gegenbauer_batch, gegenbauer_value, norm_const_a

__all__ = [
    "SphericalPoint",
    "SectorHarmonicIndex",
    "to_cartesian",
    "from_cartesian",
    "rotate_in_plane",
    "plane_rotation_matrix",
    "eval_sector_harmonic",
    "sector_harmonic_grid",
    "GaussJacobiRule",
    "gauss_jacobi_rule",
    "gegenbauer_coefficient",
]


@dataclass(frozen=True)
class SphericalPoint:
    """Point on the n-sphere: polar angles theta_1..theta_{n-1} in [0, pi], phi in [0, 2pi)."""

    thetas: tuple
    phi: float

    @property
    def n(self) -> int:
        return len(self.thetas) + 1

    def sector_angles(self) -> tuple:
        """(theta_1, theta_2) pair seen by sector harmonics; theta_2 is phi on S^2."""
        if self.n == 2:
            return self.thetas[0], self.phi
        return self.thetas[0], self.thetas[1]


@dataclass(frozen=True)
class SectorHarmonicIndex:
    """Degree/order pair (l, k1) of a sector harmonic, 0 <= k1 <= l."""

    l: int
    k1: int

    def __post_init__(self) -> None:
        if self.l < 0 or self.k1 < 0 or self.k1 > self.l:
            raise ValueError(f"need 0 <= k1 <= l, got l={self.l}, k1={self.k1}")


def to_cartesian(p: SphericalPoint) -> np.ndarray:
    """Embed the point in R^{n+1} via the polar coordinate chart."""
    angles = list(p.thetas) + [p.phi]
    n = len(angles)
    x = np.empty(n + 1)
    sin_prod = 1.0
    for i, a in enumerate(angles):
        x[i] = sin_prod * math.cos(a)
        sin_prod *= math.sin(a)
    x[n] = sin_prod
    return x


def from_cartesian(v) -> SphericalPoint:
    """Spherical coordinates of a (near-)unit vector; renormalizes internally.

    At chart degeneracies (zero tail norm) the remaining angles come out 0.
    """
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("zero vector has no spherical coordinates")
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"vector norm {norm} is not within 1e-8 of 1")
    v = v / norm
    n = v.shape[0] - 1
    thetas = []
    for k in range(n - 1):
        tail = float(np.linalg.norm(v[k + 1 :]))
        thetas.append(math.atan2(tail, v[k]))
    phi = math.atan2(v[n], v[n - 1]) % (2.0 * math.pi)
    return SphericalPoint(thetas=tuple(thetas), phi=phi)


def plane_rotation_matrix(n: int, theta: float) -> np.ndarray:
    """Rotation of R^{n+1} by angle theta in the (x1, x2) coordinate plane."""
    m = np.eye(n + 1)
    c, s = math.cos(theta), math.sin(theta)
    m[0, 0] = c
    m[0, 1] = -s
    m[1, 0] = s
    m[1, 1] = c
    return m


def rotate_in_plane(p: SphericalPoint, theta: float) -> SphericalPoint:
    """Apply the (x1, x2)-plane rotation and return spherical coordinates."""
    x = to_cartesian(p)
    y = x.copy()
    c, s = math.cos(theta), math.sin(theta)
    y[0] = c * x[0] - s * x[1]
    y[1] = s * x[0] + c * x[1]
    return from_cartesian(y)


def eval_sector_harmonic(lp: LambdaParam, l: int, k1: int, theta1, theta2):
    """Real sector harmonic of degree l, order k1 at angles (theta1, theta2).

    For n >= 3 this is A_l^k C_{l-k}^{lam+k}(cos theta1) sin^k(theta1)
    C_k^{lam-1/2}(cos theta2); for n = 2 the real combination with the phi
    factor 2 cos(k phi) (theta2 plays the role of phi).  Returns 0 for k1 > l.
    Accepts scalars or broadcasting arrays.
    """
    if k1 < 0:
        raise ValueError("k1 must be >= 0")
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    if k1 > l:
        return np.zeros(np.broadcast(theta1, theta2).shape)
    lam = lp.lam
    a = norm_const_a(lp, l, k1)
    c1 = gegenbauer_value(lam + k1, l - k1, np.cos(theta1))
    radial = a * c1 * np.sin(theta1) ** k1
    if lp.n == 2:
        angular = 1.0 if k1 == 0 else 2.0 * np.cos(k1 * theta2)
    else:
        angular = gegenbauer_value(lam - 0.5, k1, np.cos(theta2))
    out = radial * angular
    return out if out.shape else float(out)


def sector_harmonic_grid(lp: LambdaParam, l: int, k1: int, point: SphericalPoint) -> float:
    """Sector harmonic evaluated at a SphericalPoint."""
    t1, t2 = point.sector_angles()
    return float(eval_sector_harmonic(lp, l, k1, t1, t2))


@dataclass(frozen=True)
class GaussJacobiRule:
    """Nodes/weights on [-1, 1] for weight (1 - t^2)^(lam - 1/2)."""

    lam: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.shape[0]


def gauss_jacobi_rule(lam: float, n_nodes: int) -> GaussJacobiRule:
    """Gauss-Jacobi rule with the zonal weight of the (2*lam+1)-sphere."""
    if n_nodes < 1:
        raise ValueError("rule needs at least one node")
    x, w = roots_jacobi(n_nodes, lam - 0.5, lam - 0.5)
    return GaussJacobiRule(lam=float(lam), nodes=x, weights=w)


def _gegenbauer_norm_inv(l: int, lam: float) -> float:
    # c(l, lam): the constant that inverts the Gegenbauer squared norm.
    lg = (
        (2.0 * lam - 1.0) * math.log(2.0)
        + gammaln(l + 1)
        + math.log(lam + l)
        + 2.0 * gammaln(lam)
        - math.log(math.pi)
        - gammaln(2.0 * lam + l)
    )
    return math.exp(lg)


def gegenbauer_coefficient(rule: GaussJacobiRule, f_values, l: int) -> float:
    """Degree-l Gegenbauer coefficient of a zonal function sampled at the rule's nodes.

    Computes c(l, lam) * integral f(t) C_l(t) (1-t^2)^(lam-1/2) dt by quadrature.
    The rule must resolve the integrand: it is rejected outright when it cannot
    even integrate C_l against a constant exactly.
    """
    if rule.order < l + 1:
        raise ValueError(
            f"quadrature order {rule.order} insufficient for degree {l}; need at least {l + 1} nodes"
        )
    f_values = np.asarray(f_values, dtype=float)
    if f_values.shape != rule.nodes.shape:
        raise ValueError("f_values must be sampled at the rule's nodes")
    cl = gegenbauer_batch(rule.lam, l, rule.nodes)[l]
    integral = float(np.sum(rule.weights * f_values * cl))
    return _gegenbauer_norm_inv(l, rule.lam) * integral
