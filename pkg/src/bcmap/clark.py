"""Aleksandrov-Clark measures of finite Blaschke products.

For a degree-``d`` product ``F`` and ``|alpha| = 1`` the measure is atomic:
one atom at each solution of ``F(e^{i theta}) = alpha`` with mass equal to
the reciprocal boundary phase speed there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .disk import TWO_PI, check_disk, normalize_angle, one_minus_abs2
from .errors import NumericalFailure

HEAVY_FRACTION = 1.0 / 100.0
SCAN_PER_DEGREE = 1 << 10
BISECTION_STEPS = 60


@dataclass(frozen=True, eq=False)
class CircleMeasure:
    """Atomic measure on the unit circle plus the Herglotz imaginary constant."""

    angles: np.ndarray
    masses: np.ndarray
    herglotz_constant: float = 0.0

    def __post_init__(self):
        ang = normalize_angle(np.atleast_1d(np.asarray(self.angles, dtype=float)).ravel())
        ms = np.atleast_1d(np.asarray(self.masses, dtype=float)).ravel()
        if ang.shape != ms.shape:
            raise ValueError("angles and masses must have equal length")
        if np.any(ms <= 0):
            raise ValueError("masses must be positive")
        order = np.argsort(ang, kind="stable")
        object.__setattr__(self, "angles", ang[order])
        object.__setattr__(self, "masses", ms[order])
        object.__setattr__(self, "herglotz_constant", float(self.herglotz_constant))

    @classmethod
    def dirac(cls, angle=0.0, mass=1.0):
        return cls(np.array([angle]), np.array([mass]))

    def __len__(self):
        return self.angles.size

    @property
    def total_mass(self):
        return float(self.masses.sum())


@dataclass(frozen=True)
class Arc:
    """Arc of the circle; ``length`` is the normalized measure (full circle = 1)."""

    center_angle: float
    length: float

    def __post_init__(self):
        if not 0.0 < self.length <= 1.0:
            raise ValueError("arc length must lie in (0, 1]")
        object.__setattr__(self, "center_angle", normalize_angle(float(self.center_angle)))

    @property
    def start_angle(self):
        return self.center_angle - math.pi * self.length

    @property
    def point(self):
        """``z_I = (1 - |I|/2) e^{i center}``, the center of the Carleson square over the arc."""
        return (1.0 - self.length / 2.0) * complex(math.cos(self.center_angle), math.sin(self.center_angle))

    def scaled(self, factor):
        """Arc with the same midpoint and ``factor`` times the length (capped at the full circle)."""
        return Arc(self.center_angle, min(1.0, self.length * factor))

    def subarcs(self, depth):
        """The ``2^depth`` dyadic sub-arcs, in counterclockwise order."""
        n = 1 << depth
        sub = self.length / n
        return [Arc(self.start_angle + TWO_PI * sub * (j + 0.5), sub) for j in range(n)]

    def contains(self, theta):
        offset = np.mod(np.asarray(theta, dtype=float) - self.start_angle, TWO_PI)
        return offset < TWO_PI * self.length


def point_arc(z, factor=1.0):
    """``factor * I(z)`` where ``I(z)`` is centered at ``z/|z|`` with length ``2(1 - |z|)``."""
    z = check_disk(z)
    if z == 0:
        raise ValueError("I(z) is undefined at the origin")
    return Arc(math.atan2(z.imag, z.real), min(1.0, 2.0 * (1.0 - abs(z)) * factor))


def clark_measure(F, alpha) -> CircleMeasure:
    """Clark measure ``mu_alpha`` of ``F`` for the boundary point ``e^{i alpha}``."""
    d = F.degree
    m = SCAN_PER_DEGREE * d
    theta = TWO_PI * np.arange(m + 1) / m
    phase = F.boundary_phase(theta)
    if not np.all(np.diff(phase) > 0):
        raise NumericalFailure("boundary phase is not strictly increasing on the scan")
    if abs(phase[-1] - phase[0] - TWO_PI * d) > 1e-6:
        raise NumericalFailure("boundary phase does not wind d times")
    # targets alpha + 2 pi k inside [phase[0], phase[0] + 2 pi d)
    k0 = math.ceil((phase[0] - alpha) / TWO_PI)
    targets = alpha + TWO_PI * (k0 + np.arange(d))
    idx = np.searchsorted(phase, targets, side="right") - 1
    lo = theta[idx].copy()
    hi = theta[np.minimum(idx + 1, m)].copy()
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = F.boundary_phase(mid) > targets
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    roots = 0.5 * (lo + hi)
    a = complex(math.cos(alpha), math.sin(alpha))
    # polish on the principal argument of F/alpha, which is O(1e-16) accurate near the root
    for _ in range(2):
        Fb, _, _ = F.evaluate_all(np.exp(1j * roots), gap=np.zeros_like(roots))
        roots = roots - np.angle(Fb / a) / F.boundary_phase_speed(roots)
    masses = 1.0 / F.boundary_phase_speed(roots)
    f0 = F.evaluate(0.0)
    c_alpha = ((a + f0) / (a - f0)).imag
    return CircleMeasure(roots, masses, c_alpha)


def poisson_extension(mu: CircleMeasure, z) -> float:
    """``sum mass (1 - |z|^2) / |e^{i theta} - z|^2``; vectorises over ``z``."""
    z = check_disk(z)
    zz = np.atleast_1d(z)[..., None]
    xi = np.exp(1j * mu.angles)
    out = (mu.masses * one_minus_abs2(zz) / np.abs(xi - zz) ** 2).sum(axis=-1)
    return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def herglotz_real_part(F, alpha, z):
    """``Re (alpha + F)/(alpha - F) = (1 - |F|^2) / |alpha - F|^2``."""
    z = check_disk(z)
    a = complex(math.cos(alpha), math.sin(alpha))
    Fz, _, omf2 = F.evaluate_all(z)
    out = omf2 / np.abs(a - Fz) ** 2
    return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def arc_mass(mu: CircleMeasure, arc: Arc) -> float:
    return float(mu.masses[arc.contains(mu.angles)].sum())


def arc_mean(mu: CircleMeasure, arc: Arc) -> float:
    """``mu(I) / |I|`` over the half-open arc."""
    return arc_mass(mu, arc) / arc.length


class HeavyArc(NamedTuple):
    heavy: bool
    margin: float
    mean: float
    poisson: float


def is_heavy_arc(mu: CircleMeasure, arc: Arc) -> HeavyArc:
    """Heavy iff ``mu(I)/|I| >= u(z_I) / 100`` and ``mu(I) > 0``."""
    mean = arc_mean(mu, arc)
    u = poisson_extension(mu, arc.point)
    margin = mean - HEAVY_FRACTION * u
    return HeavyArc(bool(mean > 0.0 and margin >= 0.0), margin, mean, u)


class LightArc(NamedTuple):
    arc: Arc
    delta: float
    ratio: float


def light_subarc_search(mu: CircleMeasure, arc: Arc, eps, delta_min):
    """Largest dyadic sub-arc ``J`` with ``mu(J)/|J| <= eps * mu(I)/|I|`` and ``|J| >= delta_min |I|``.

    Returns a :class:`LightArc` (ties broken by smallest ratio, then position) or ``None``.
    """
    if eps <= 0 or not 0 < delta_min <= 1:
        raise ValueError("need eps > 0 and 0 < delta_min <= 1")
    parent = arc_mean(mu, arc)
    inside = arc.contains(mu.angles)
    offs = np.mod(mu.angles[inside] - arc.start_angle, TWO_PI) / (TWO_PI * arc.length)
    ms = mu.masses[inside]
    depth = 0
    while math.ldexp(1.0, -depth) >= delta_min:
        n = 1 << depth
        mass = np.zeros(n)
        if ms.size:
            np.add.at(mass, np.clip(np.floor(offs * n).astype(np.int64), 0, n - 1), ms)
        means = mass / (arc.length / n)
        ok = np.nonzero(means <= eps * parent)[0]
        if ok.size:
            j = int(ok[np.argmin(means[ok])])
            ratio = means[j] / parent if parent > 0 else 0.0
            return LightArc(arc.subarcs(depth)[j], 1.0 / n, float(ratio))
        depth += 1
    return None


class GradientCheck(NamedTuple):
    lhs: float
    rhs: float
    gap: float


def _extended_atoms(F, alpha, angles):
    """Re-polish atom angles and masses in ``longdouble`` (two Newton steps on ``Arg(F/alpha)``)."""
    ld = np.longdouble
    a = np.asarray(F.zeros, dtype=np.clongdouble)[None, :]
    oma2 = (ld(1) - np.abs(a)) * (ld(1) + np.abs(a))
    pref = np.exp(1j * ld(F.prefactor_angle))
    target = np.exp(1j * ld(alpha))
    th = np.asarray(angles, dtype=ld)
    for _ in range(2):
        xi = np.exp(1j * th)[:, None]
        val = pref * np.prod((xi - a) / (1 - np.conj(a) * xi), axis=1)
        speed = (oma2 / np.abs(xi - a) ** 2).sum(axis=1)
        th = th - np.angle(val / target) / speed
    xi = np.exp(1j * th)[:, None]
    speed = (oma2 / np.abs(xi - a) ** 2).sum(axis=1)
    return th, 1 / speed


def poisson_gradient_term(mu: CircleMeasure, z, extended=False):
    """``(1 - |z|^2) |grad u(z)|`` for the atomic Poisson integral, in closed form.

    Returns the pair ``(gradient term, u(z))``. With ``extended`` the sums run
    in ``longdouble``; ``mu`` may then carry ``longdouble`` angles.
    """
    dt = np.clongdouble if extended else complex
    z = np.asarray(z, dtype=dt)
    xi = np.exp(1j * np.asarray(mu.angles, dtype=np.longdouble if extended else float))
    masses = np.asarray(mu.masses, dtype=np.longdouble if extended else float)
    omz2 = (1 - np.abs(z)) * (1 + np.abs(z))
    kern = masses * omz2 / np.abs(xi - z) ** 2
    rot = (xi - z) / (1 - np.conj(z) * xi)
    s = (kern / rot).sum()
    return 2 * abs(s), kern.sum()


def gradient_identity_check(F, alpha, z, mu=None, extended=True) -> GradientCheck:
    """Compare ``2 D_h F(z)`` with ``(1 - |z|^2)|grad u(z)| / u(z)`` for ``u`` the Poisson
    integral of the Clark measure ``mu_alpha``.

    The right side cancels heavily where ``D_h F`` is small, so by default the
    atoms are re-polished and the sums evaluated in extended precision.
    """
    z = check_disk(z)
    if mu is None:
        mu = clark_measure(F, alpha)
    src = mu
    if extended:
        th, ms = _extended_atoms(F, alpha, mu.angles)
        src = _RawAtoms(th, ms)
    lhs = 2.0 * F.hyperbolic_derivative(z)
    grad, u = poisson_gradient_term(src, z, extended)
    rhs = float(grad / u)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    gap = abs(lhs - rhs) / scale if (lhs or rhs) else 0.0
    return GradientCheck(float(lhs), rhs, float(gap))


class _RawAtoms(NamedTuple):
    angles: np.ndarray
    masses: np.ndarray
