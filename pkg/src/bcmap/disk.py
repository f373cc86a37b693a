"""Hyperbolic geometry of the unit disk.

Conventions: the metric is ``2|dz| / (1 - |z|^2)`` (curvature -1), so
``d_h(0, r) = log((1 + r) / (1 - r))``. Points are plain Python/numpy complex
numbers; every public entry point validates them against
:data:`ADMISSION_MARGIN`. Boundary points are angles in radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ADMISSION_MARGIN = 1e-12
TWO_PI = 2.0 * math.pi


def check_disk(z, name="z"):
    """Return ``z`` as complex (scalar) or complex array; reject points too close to the circle."""
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if arr.size and np.max(np.abs(arr)) >= 1.0 - ADMISSION_MARGIN:
        raise DomainError(f"{name} must satisfy |{name}| < 1 - {ADMISSION_MARGIN:g}")
    if arr.ndim == 0:
        return complex(arr)
    return arr


def normalize_angle(theta):
    """Reduce an angle (or array of angles) to ``[0, 2*pi)``."""
    t = np.mod(theta, TWO_PI)
    if np.ndim(t) == 0:
        t = float(t)
        return 0.0 if t >= TWO_PI else t
    return np.where(t >= TWO_PI, 0.0, t)


def one_minus_abs2(z, gap=None):
    """``1 - |z|^2`` computed as ``(1 - |z|)(1 + |z|)``; ``gap`` overrides ``1 - |z|``."""
    if gap is None:
        gap = 1.0 - np.abs(z)
    return gap * (2.0 - gap)


def one_minus_rho2(z, w):
    """``1 - rho(z, w)^2 = (1 - |z|^2)(1 - |w|^2) / |1 - conj(w) z|^2``, without cancellation."""
    den = np.abs(1.0 - np.conj(w) * z) ** 2
    return one_minus_abs2(z) * one_minus_abs2(w) / den


def pseudohyperbolic_distance(z, w):
    """``|z - w| / |1 - conj(z) w|``; vectorises over numpy arrays."""
    z = check_disk(z, "z")
    w = check_disk(w, "w")
    return np.abs(z - w) / np.abs(1.0 - np.conj(z) * w)


def rho_to_dh(rho, om_rho2=None):
    """Convert pseudohyperbolic to hyperbolic distance.

    When ``1 - rho^2`` is known accurately it is used directly, which keeps
    precision for points far apart.
    """
    rho = np.asarray(rho, dtype=float)
    if om_rho2 is None:
        om_rho2 = (1.0 - rho) * (1.0 + rho)
    with np.errstate(divide="ignore"):
        out = 2.0 * np.log1p(rho) - np.log(om_rho2)
    return out if out.ndim else float(out)


def hyperbolic_distance(z, w):
    """``log((1 + rho) / (1 - rho))`` with ``rho`` the pseudohyperbolic distance."""
    z = check_disk(z, "z")
    w = check_disk(w, "w")
    rho = np.abs(z - w) / np.abs(1.0 - np.conj(z) * w)
    return rho_to_dh(rho, np.minimum(one_minus_rho2(z, w), 1.0))


def dh_from_origin(r):
    """``d_h(0, r)`` for a modulus ``r`` (vectorised)."""
    return rho_to_dh(r)


def radius_from_dh(t):
    """Euclidean modulus of the point at hyperbolic distance ``t`` from 0."""
    return np.tanh(np.asarray(t, dtype=float) / 2.0)


@dataclass(frozen=True)
class Mobius:
    """Disk automorphism ``z -> exp(i*theta) (z - a) / (1 - conj(a) z)``."""

    a: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", check_disk(self.a, "a"))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def rotation(self):
        return complex(math.cos(self.theta), math.sin(self.theta))

    def __call__(self, z):
        return self.rotation * (z - self.a) / (1.0 - np.conj(self.a) * z)

    def inverse(self):
        # w = e^{it}(z-a)/(1-conj(a)z)  <=>  z = (u + a)/(1 + conj(a) u), u = e^{-it} w
        #   = e^{-it}(w - b)/(1 - conj(b) w) with b = -e^{it} a
        return Mobius(-self.rotation * self.a, -self.theta)

    def derivative(self, z):
        return self.rotation * (1.0 - abs(self.a) ** 2) / (1.0 - np.conj(self.a) * z) ** 2


def mobius_to_origin(a):
    """The map ``m_{a->0}(z) = (z - a) / (1 - conj(a) z)``."""
    return Mobius(a, 0.0)


def mobius_apply(m: Mobius, z):
    """Apply ``m`` to disk point(s) ``z``; rejects images that land on the circle numerically."""
    z = check_disk(z)
    out = m(z)
    if np.max(np.abs(out)) >= 1.0 - ADMISSION_MARGIN:
        raise DomainError("Mobius image within 1e-12 of the unit circle (precision loss)")
    return out


@dataclass(frozen=True)
class HyperbolicBall:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", check_disk(self.center, "center"))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("radius must be positive and finite")

    def euclidean(self):
        return ball_to_euclidean(self)

    def contains(self, w):
        return hyperbolic_distance(self.center, w) < self.radius


def ball_to_euclidean(b: HyperbolicBall):
    """Euclidean ``(center, radius)`` of the hyperbolic ball ``b``."""
    z0 = b.center
    t = math.tanh(b.radius / 2.0)
    s = abs(z0) ** 2
    denom = 1.0 - t * t * s
    return z0 * (1.0 - t * t) / denom, t * (1.0 - s) / denom


def hyperbolic_ball_area(radius):
    """Hyperbolic area ``4 pi sinh^2(R/2)`` of a ball of radius ``R``."""
    return 4.0 * math.pi * math.sinh(radius / 2.0) ** 2


def ball_boundary(z, radius, n):
    """``n`` hyperbolically equispaced points on the boundary circle of ``B_h(z, radius)``.

    Returns ``(w, om2)`` with ``om2 = 1 - |w|^2`` computed without cancellation.
    """
    z = complex(z)
    t = math.tanh(radius / 2.0)
    u = t * np.exp(1j * TWO_PI * np.arange(n) / n)
    den = 1.0 + np.conj(z) * u
    w = (u + z) / den
    om2 = one_minus_abs2(z) * (1.0 - t * t) / np.abs(den) ** 2
    return w, om2


def ball_points(z, zeta):
    """Image of points ``zeta`` (around 0) under the automorphism sending 0 to ``z``.

    Returns ``(w, om2)``; hyperbolic distances from ``z`` equal those of ``zeta`` from 0.
    """
    z = complex(z)
    zeta = np.asarray(zeta, dtype=complex)
    den = 1.0 + np.conj(z) * zeta
    w = (zeta + z) / den
    om2 = one_minus_abs2(z) * one_minus_abs2(zeta) / np.abs(den) ** 2
    return w, om2


def geodesic_point(z, xi, t):
    """Point at hyperbolic distance ``t`` from ``z`` on the geodesic ray from ``z`` to ``exp(i xi)``.

    Computed by moving ``z`` to the origin, stepping radially, and moving back.
    Vectorises over ``t``.
    """
    z = check_disk(z)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("t must be finite and nonnegative")
    boundary = complex(math.cos(xi), math.sin(xi))
    eta = (boundary - z) / (1.0 - np.conj(z) * boundary)
    eta /= abs(eta)
    u = np.tanh(t / 2.0) * eta
    w = (u + z) / (1.0 + np.conj(z) * u)
    if np.ndim(w) == 0:
        w = complex(w)
        if t == 0:
            return z
    return w


def hyperbolic_polar_grid(r_max, step):
    """Hyperbolically quasi-uniform polar grid of the closed disk ``|z| <= r_max``.

    Rings sit at hyperbolic radii ``k * step``; each ring carries about
    ``2 pi sinh(rho) / step`` points so neighbours are ~``step`` apart.
    """
    rho_max = dh_from_origin(r_max)
    pts = [np.zeros(1, dtype=complex)]
    rhos = np.arange(step, rho_max + 0.5 * step, step)
    rhos = np.minimum(rhos, rho_max)
    for k, rho in enumerate(rhos):
        count = max(6, int(math.ceil(TWO_PI * math.sinh(rho) / step)))
        offset = 0.5 * (k % 2)
        ang = TWO_PI * (np.arange(count) + offset) / count
        pts.append(math.tanh(rho / 2.0) * np.exp(1j * ang))
    return np.concatenate(pts)
