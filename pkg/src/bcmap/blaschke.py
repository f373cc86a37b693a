"""Finite Blaschke products ``F(z) = exp(i*theta) * prod (z - a_n) / (1 - conj(a_n) z)``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernels
from .disk import Mobius, TWO_PI, check_disk, one_minus_abs2
from .errors import NumericalFailure, PreconditionError, SingularInputError

# multiple zeros / critical points are merged below this pseudohyperbolic radius
CLUSTER_RHO = 1e-7
# log_derivative_sum refuses points this close (pseudohyperbolically) to a zero
SINGULAR_RHO = 1e-9
CRITICAL_RESIDUAL_TOL = 1e-8
REFLECT_MIN = 1e-8


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        v = values[0]
        return complex(v) if np.iscomplexobj(values) else float(v)
    return values.reshape(np.shape(like))


@dataclass(frozen=True)
class CriticalSet:
    """Critical points of a Blaschke product, repeated according to multiplicity."""

    points: np.ndarray

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True, eq=False)
class BlaschkeProduct:
    """A finite Blaschke product given by its zeros (with multiplicity) and prefactor angle."""

    zeros: np.ndarray
    prefactor_angle: float = 0.0
    _crit: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        zeros = np.atleast_1d(np.asarray(self.zeros, dtype=complex)).ravel().copy()
        if zeros.size < 1:
            raise ValueError("a Blaschke product needs at least one zero")
        check_disk(zeros, "zero")
        zeros.setflags(write=False)
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "prefactor_angle", float(self.prefactor_angle))

    @classmethod
    def from_zeros(cls, zeros, prefactor_angle=0.0):
        return cls(np.asarray(zeros, dtype=complex), prefactor_angle)

    @property
    def degree(self):
        return int(self.zeros.size)

    @property
    def phase(self):
        return complex(math.cos(self.prefactor_angle), math.sin(self.prefactor_angle))

    # -- evaluation -----------------------------------------------------------

    def evaluate_all(self, z, gap=None, backend=None):
        """Return ``(F, F', 1 - |F|^2)`` as flat arrays.

        ``gap`` may supply ``1 - |z|`` exactly (e.g. for dyadic square centers).
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        if gap is not None:
            gap = np.atleast_1d(np.asarray(gap, dtype=float)).ravel()
        return kernels.blaschke_eval(self.zeros, z, gap, self.phase, backend=backend)

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        z = check_disk(z)
        F, _, _ = self.evaluate_all(z)
        return _scalar_or_array(F, z)

    def derivative(self, z):
        """``F'(z)``; logarithmic differentiation away from zeros, product rule near them."""
        z = check_disk(z)
        _, dF, _ = self.evaluate_all(z)
        return _scalar_or_array(dF, z)

    def one_minus_abs2(self, z, gap=None):
        """``1 - |F(z)|^2`` with full relative precision."""
        z = check_disk(z)
        _, _, omf2 = self.evaluate_all(z, gap)
        return _scalar_or_array(omf2, z)

    def hyperbolic_derivative(self, z, gap=None):
        """``(1 - |z|^2) |F'(z)| / (1 - |F(z)|^2)``."""
        z = check_disk(z)
        _, dF, omf2 = self.evaluate_all(z, gap)
        zz = np.atleast_1d(z).ravel()
        g = None if gap is None else np.atleast_1d(gap).ravel()
        out = one_minus_abs2(zz, g) * np.abs(dF) / omf2
        return _scalar_or_array(out, z)

    def zero_sum_surrogate(self, z):
        """``sum_n (1 - |z|^2)(1 - |a_n|^2) / |1 - conj(a_n) z|^2``."""
        z = check_disk(z)
        zz = np.atleast_1d(z).ravel()[:, None]
        a = self.zeros[None, :]
        terms = one_minus_abs2(zz) * one_minus_abs2(a) / np.abs(1.0 - np.conj(a) * zz) ** 2
        return _scalar_or_array(terms.sum(axis=1), z)

    def log_derivative_sum(self, z):
        """The sum ``sum_n (1-|z|^2)(1-|a_n|^2) / (|1 - conj(a_n) z|^2 (a_n - z)/(1 - a_n conj(z)))``.

        Its modulus is ``(1 - |z|^2) |F'(z)| / |F(z)|``.
        """
        z = check_disk(z)
        zz = np.atleast_1d(z).ravel()[:, None]
        a = self.zeros[None, :]
        rho = np.abs(zz - a) / np.abs(1.0 - np.conj(a) * zz)
        if np.any(rho < SINGULAR_RHO):
            raise SingularInputError("point coincides with a zero of F (pseudohyperbolic distance < 1e-9)")
        den1 = np.abs(1.0 - np.conj(a) * zz) ** 2
        rot = (a - zz) / (1.0 - a * np.conj(zz))
        terms = one_minus_abs2(zz) * one_minus_abs2(a) / (den1 * rot)
        return _scalar_or_array(terms.sum(axis=1), z)

    # -- boundary behaviour -----------------------------------------------------

    def boundary_phase(self, theta):
        """Continuous lift of ``arg F(exp(i theta))``; increases by ``2 pi d`` over a turn."""
        theta = np.asarray(theta, dtype=float)
        t = theta[..., None]
        lift = np.angle(1.0 - self.zeros * np.exp(-1j * t)).sum(axis=-1)
        return self.prefactor_angle + self.degree * theta + 2.0 * lift

    def boundary_phase_speed(self, theta):
        """``d/dtheta arg F(exp(i theta)) = sum (1 - |a_n|^2) / |exp(i theta) - a_n|^2``."""
        theta = np.asarray(theta, dtype=float)
        xi = np.exp(1j * theta)[..., None]
        out = (one_minus_abs2(self.zeros) / np.abs(xi - self.zeros) ** 2).sum(axis=-1)
        return float(out) if out.ndim == 0 else out

    # -- critical points -----------------------------------------------------------

    def zero_clusters(self):
        """Distinct zeros with multiplicities (merging at pseudohyperbolic radius 1e-7)."""
        centers, counts = [], []
        for a in self.zeros:
            for k, c in enumerate(centers):
                if abs(a - c) / abs(1.0 - np.conj(c) * a) < CLUSTER_RHO:
                    counts[k] += 1
                    break
            else:
                centers.append(complex(a))
                counts.append(1)
        return np.array(centers, dtype=complex), np.array(counts, dtype=float)

    def critical_points(self):
        """Critical points inside the disk, ``d - 1`` of them counted with multiplicity."""
        if not self._crit:
            self._crit.append(_critical_points(self))
        return self._crit[0]

    # -- composition with automorphisms ----------------------------------------------

    def _phase_for(self, zeros, target):
        """Prefactor angle making ``prod m_{zeros}`` agree with the map ``target`` (up to rounding)."""
        probes = np.array([0.0, 0.5, -0.5, 0.5j, -0.5j, 0.3 + 0.3j], dtype=complex)
        G = np.prod((probes[:, None] - zeros[None, :]) / (1.0 - np.conj(zeros)[None, :] * probes[:, None]), axis=1)
        k = int(np.argmax(np.abs(G)))
        return float(np.angle(target(probes[k]) / G[k]))

    def precompose(self, m: Mobius) -> "BlaschkeProduct":
        """The product ``F o m``."""
        new_zeros = m.inverse()(self.zeros)
        angle = self._phase_for(new_zeros, lambda z: self.evaluate(m(z)))
        return BlaschkeProduct(new_zeros, angle)

    def postcompose(self, tau: Mobius) -> "BlaschkeProduct":
        """The product ``tau o F``; its zeros solve ``F(z) = tau^{-1}(0)``."""
        b = tau.inverse()(0.0)
        new_zeros = self.solve(b)
        angle = self._phase_for(new_zeros, lambda z: tau(self.evaluate(z)))
        return BlaschkeProduct(new_zeros, angle)

    def solve(self, b):
        """All ``d`` solutions of ``F(z) = b`` for ``|b| < 1`` (they lie in the disk)."""
        b = check_disk(b, "b")
        num = np.poly(self.zeros) * self.phase
        den = np.array([1.0 + 0j])
        for a in self.zeros:
            den = np.convolve(den, np.array([-np.conj(a), 1.0]))
        roots = np.roots(num - b * den)
        roots = np.array([_newton_solve(self, r, b) for r in roots])
        if roots.size != self.degree or np.any(np.abs(roots) >= 1.0):
            raise NumericalFailure("failed to locate all preimages inside the disk")
        return roots


def _newton_solve(F, z, b, steps=60):
    for _ in range(steps):
        Fz, dFz, _ = F.evaluate_all(np.array([z]))
        if dFz[0] == 0:
            break
        dz = (Fz[0] - b) / dFz[0]
        z = z - dz
        if abs(z) >= 1.0:
            z = z / abs(z) * (1.0 - 1e-9)
        if abs(dz) < 1e-16 * max(1e-3, 1.0 - abs(z)):
            break
    return complex(z)


def _pole_residue_zeros(centers, counts):
    """Finite zeros of ``F'/F`` from its pole-residue form via an arrowhead companion pencil.

    ``F'/F = sum k_j / (z - a_j) - sum k_j / (z - 1/conj(a_j))``; the zeros of
    ``sum r_i / (z - p_i)`` are the finite generalized eigenvalues of
    ``([[0, r^T], [1, diag(p)]], diag(0, I))``.
    """
    # reflected poles of tiny zeros contribute O(|a|) inside the disk; Newton polishing absorbs it
    inner = np.abs(centers) > REFLECT_MIN
    poles = np.concatenate([centers, 1.0 / np.conj(centers[inner])])
    res = np.concatenate([counts, -counts[inner]]).astype(complex)
    n = poles.size
    A = np.zeros((n + 1, n + 1), dtype=complex)
    A[0, 1:] = res
    A[1:, 0] = 1.0
    A[1:, 1:] = np.diag(poles)
    B = np.eye(n + 1, dtype=complex)
    B[0, 0] = 0.0
    vals = scipy.linalg.eigvals(A, B)
    return vals[np.isfinite(vals)]


def _g_and_dg(centers, weights, z):
    """``g = F'/F = sum w_j / ((z - a_j)(1 - conj(a_j) z))`` and ``g'``; also sum of |terms|."""
    num = z - centers
    den = 1.0 - np.conj(centers) * z
    q = num * den
    terms = weights / q
    dq = 1.0 - 2.0 * np.conj(centers) * z + np.abs(centers) ** 2
    return terms.sum(), -(weights * dq / q**2).sum(), np.abs(terms).sum()


def _critical_points(F: BlaschkeProduct) -> CriticalSet:
    centers, counts = F.zero_clusters()
    # each zero of multiplicity k is a critical point of multiplicity k-1
    points = [c for c, k in zip(centers, counts) for _ in range(int(k) - 1)]
    D = centers.size
    if D >= 2:
        weights = counts * one_minus_abs2(centers)
        roots = _pole_residue_zeros(centers, counts)
        roots = roots[np.argsort(np.abs(roots))][: D - 1]
        if roots.size != D - 1:
            raise NumericalFailure("companion pencil returned too few finite eigenvalues")
        refined = []
        for r in roots:
            z = complex(r)
            if abs(z) >= 1.0:
                z = z / abs(z) * (1.0 - 1e-6)
            for _ in range(100):
                g, dg, _ = _g_and_dg(centers, weights, z)
                if dg == 0:
                    break
                step = g / dg
                znew = z - step
                if abs(znew) >= 1.0:
                    znew = 0.5 * (z + znew / abs(znew) * abs(z))
                z = znew
                if abs(step) <= 1e-15 * max(1e-12, 1.0 - abs(z)) + 1e-17:
                    break
            g, _, scale = _g_and_dg(centers, weights, z)
            if abs(z) >= 1.0 or abs(g) > CRITICAL_RESIDUAL_TOL * scale:
                raise NumericalFailure(
                    f"critical point refinement failed (|F'/F| = {abs(g):.3g}, scale {scale:.3g})"
                )
            refined.append(z)
        points.extend(_merge_clusters(np.array(refined)))
    pts = np.array(points, dtype=complex)
    if pts.size != F.degree - 1:
        raise NumericalFailure(f"found {pts.size} critical points, expected {F.degree - 1}")
    return CriticalSet(pts)


def _merge_clusters(pts):
    """Replace groups of points within CLUSTER_RHO of each other by their mean, kept with multiplicity."""
    out = []
    used = np.zeros(pts.size, dtype=bool)
    for i in range(pts.size):
        if used[i]:
            continue
        rho = np.abs(pts - pts[i]) / np.abs(1.0 - np.conj(pts[i]) * pts)
        group = (~used) & (rho < CLUSTER_RHO)
        used |= group
        mean = pts[group].mean()
        out.extend([mean] * int(group.sum()))
    return out


def jensen_circle_terms(F: BlaschkeProduct, r, n_nodes=1 << 14):
    """Circle mean of ``log|F'(r e^{i theta})|`` by the periodic trapezoid rule."""
    theta = TWO_PI * np.arange(n_nodes) / n_nodes
    _, dF, _ = F.evaluate_all(r * np.exp(1j * theta))
    if np.any(dF == 0):
        raise PreconditionError("F' vanishes on the quadrature circle")
    return float(np.mean(np.log(np.abs(dF))))
