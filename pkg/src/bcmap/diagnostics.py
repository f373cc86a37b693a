"""Numerical diagnostics for bounded-compression conditions.

Every routine works at a finite resolution and reports what it measured; none
of them certify a limit statement. Balls are hyperbolic (metric
``2|dz|/(1-|z|^2)``) and default to radius 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate

from . import kernels
from .carleson import BASE_LEVEL, DyadicSquare, dyadic_centers
from .disk import (
    TWO_PI,
    HyperbolicBall,
    ball_boundary,
    ball_points,
    ball_to_euclidean,
    check_disk,
    hyperbolic_polar_grid,
    one_minus_abs2,
    rho_to_dh,
)
from .errors import (
    BoundaryProximityError,
    DescentNotFound,
    NumericalFailure,
    PreconditionError,
)

PROXIMITY_TOL = 1e-9
MAX_DESCENT_LEVEL = 38  # centers at deeper levels fall inside the 1e-12 admission margin
C_CAP = 20.0
DESCENT_RTOL = 1e-12  # ratios within rounding of eps count as witnesses
S_STEP = 0.01


# -- shared helpers -------------------------------------------------------------


def _gap_from_om2(w, om2):
    """``1 - |w|`` from an accurate ``1 - |w|^2``."""
    return om2 / (1.0 + np.abs(w))


def _eval_on(F, w, om2, backend=None):
    return F.evaluate_all(w, gap=_gap_from_om2(w, om2), backend=backend)


def _one_minus_abs(Fw, omf2):
    # |F| from omf2 keeps dyadic-center arithmetic exact for automorphisms
    return omf2 / (1.0 + np.sqrt(1.0 - omf2))


def _pair_distances(Fw, omf2):
    """Matrix of ``d_h(F_i, F_j)`` from accurate ``1 - |F|^2`` values."""
    den = np.abs(1.0 - np.conj(Fw)[:, None] * Fw[None, :]) ** 2
    om_rho2 = np.minimum(omf2[:, None] * omf2[None, :] / den, 1.0)
    rho = np.sqrt(np.maximum(0.0, 1.0 - om_rho2))
    return rho_to_dh(rho, om_rho2)


def center_grid(kind="dyadic", r_max=0.995, max_level=12, base_level=BASE_LEVEL, step=0.25):
    """Evaluation grid for "for all z" conditions.

    ``"dyadic"`` gives the centers of every dyadic square in the level range
    (plus the origin); ``"hyperbolic"`` gives a hyperbolic polar grid of mesh
    ``step``. Returns ``(points, gaps)`` with ``gaps = 1 - |z|``.
    """
    if kind == "dyadic":
        pts, gaps, _ = dyadic_centers(base_level, max_level, r_max, include_origin=True)
        return pts, gaps
    if kind == "hyperbolic":
        pts = hyperbolic_polar_grid(r_max, step)
        return pts, 1.0 - np.abs(pts)
    raise ValueError(f"unknown grid kind {kind!r}")


def distance_to_set(z, pts):
    """Hyperbolic distance from each ``z`` to the finite set ``pts`` (``inf`` if empty)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    pts = np.asarray(pts, dtype=complex)
    if pts.size == 0:
        return np.full(z.shape, np.inf)
    zz = z[:, None]
    den = np.abs(1.0 - np.conj(pts)[None, :] * zz) ** 2
    om = np.minimum(one_minus_abs2(zz) * one_minus_abs2(pts)[None, :] / den, 1.0)
    rho = np.abs(zz - pts[None, :]) / np.sqrt(den)
    return rho_to_dh(rho, om).min(axis=1)


# -- condition (1): image diameter ------------------------------------------------------


def image_diameter(F, z, R=1.0, n_boundary=512, backend=None):
    """Hyperbolic diameter of ``F(B_h(z, R))`` from samples on the boundary circle.

    The pairwise maximum over the boundary suffices: ``w -> rho(F(w), q)`` is
    the modulus of an analytic function, so it peaks on the boundary.
    """
    z = check_disk(z)
    if not R > 0:
        raise ValueError("R must be positive")
    if n_boundary < 64:
        raise ValueError("n_boundary must be at least 64")
    w, om2 = ball_boundary(z, R, n_boundary)
    Fw, _, omf2 = _eval_on(F, w, om2, backend)
    x = kernels.pairwise_min_omrho2(Fw, omf2, backend=backend)
    if not np.isfinite(x):
        return 0.0
    x = min(x, 1.0)
    if x > 0.5:
        # small image: 1 - x cancels, so take rho^2 directly
        rho = math.sqrt(kernels.pairwise_max_rho2(Fw, backend=backend))
        return float(2.0 * math.atanh(rho))
    rho = math.sqrt(max(0.0, 1.0 - x))
    return float(rho_to_dh(rho, x))


# -- condition (1c): area counted with multiplicity -----------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    n_radial: int = 24
    n_angular: int = 64
    rtol: float = 1e-8
    max_refinements: int = 5


def _area_mult_once(F, center, radius, n_r, n_a, backend):
    x, wx = np.polynomial.legendre.leggauss(n_r)
    rho = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * wx
    ang = TWO_PI * np.arange(n_a) / n_a
    w = center + rho[:, None] * np.exp(1j * ang)[None, :]
    _, dF, omf2 = F.evaluate_all(w.ravel(), backend=backend)
    dens = (4.0 * np.abs(dF) ** 2 / omf2**2).reshape(w.shape)
    return float((wr * rho * dens.mean(axis=1)).sum() * TWO_PI)


def image_area_with_multiplicity(F, z, R=1.0, quadrature: QuadratureSpec = QuadratureSpec(), backend=None):
    """``int_{B_h(z,R)} 4|F'|^2 / (1-|F|^2)^2 dA`` on the ball's Euclidean disk.

    Gauss-Legendre in the radius, trapezoid in the angle; the grid doubles until
    two successive values agree to ``rtol``.
    """
    z = check_disk(z)
    if quadrature.n_radial < 2 or quadrature.n_angular < 4:
        raise ValueError("quadrature resolution too small")
    center, radius = ball_to_euclidean(HyperbolicBall(z, R))
    n_r, n_a = quadrature.n_radial, quadrature.n_angular
    prev = _area_mult_once(F, center, radius, n_r, n_a, backend)
    for _ in range(quadrature.max_refinements):
        n_r, n_a = 2 * n_r, 2 * n_a
        cur = _area_mult_once(F, center, radius, n_r, n_a, backend)
        if abs(cur - prev) <= quadrature.rtol * abs(cur):
            return cur
        prev = cur
    raise NumericalFailure(f"area quadrature did not converge to rtol={quadrature.rtol:g}")


# -- condition (1b): area of the image set ------------------------------------------


@dataclass(frozen=True)
class TargetGrid:
    """Polar cell grid on the target ball ``B_h(F(z), R)``; cells are classified by their midpoints."""

    n_radial: int = 160
    n_angular: int = 320
    n_curve: int = 4096


class AreaEstimate(NamedTuple):
    value: float
    degenerate: bool
    covered_fraction: float
    n_targets: int


def _image_curve(F, z, R, n, backend=None):
    w, om2 = ball_boundary(z, R, n)
    Fw, _, _ = _eval_on(F, w, om2, backend)
    return Fw


def image_area_sampled(F, z, R=1.0, grid: TargetGrid = TargetGrid(), backend=None) -> AreaEstimate:
    """Grid estimate of ``A_h(F(B_h(z, R)))``, the area of the image as a set.

    By the Schwarz lemma the image sits inside ``B_h(F(z), R)``; each target cell
    of that ball counts when the boundary image winds around its midpoint.
    """
    z = check_disk(z)
    if grid.n_radial <= 0 or grid.n_angular <= 0:
        return AreaEstimate(0.0, True, 0.0, 0)
    t = math.tanh(R / 2.0)
    edges = np.linspace(0.0, t, grid.n_radial + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    dth = TWO_PI / grid.n_angular
    ring = dth * 2.0 * (1.0 / (1.0 - edges[1:] ** 2) - 1.0 / (1.0 - edges[:-1] ** 2))
    ang = dth * (np.arange(grid.n_angular) + 0.5)
    zeta = (mids[:, None] * np.exp(1j * ang)[None, :]).ravel()
    weights = np.repeat(ring, grid.n_angular)
    Fz = F.evaluate(z)
    q, _ = ball_points(Fz, zeta)
    curve = _image_curve(F, z, R, max(grid.n_curve, 64 * max(F.degree, 1)), backend)
    counts, _ = kernels.winding_numbers(curve, q, backend=backend)
    covered = counts >= 1
    value = float(weights[covered].sum())
    return AreaEstimate(value, False, float(covered.mean()), int(q.size))


# -- condition (1d): maximal hyperbolic derivative --------------------------------------


@dataclass(frozen=True)
class BallGrid:
    n_radial: int = 24
    n_angular: int = 64
    n_refine: int = 17


def max_hyperbolic_derivative(F, z, R=1.0, grid: BallGrid = BallGrid(), backend=None):
    """Max of ``D_h F`` over a polar grid of ``B_h(z, R)`` (boundary included), refined once at the argmax."""
    z = check_disk(z)
    t = math.tanh(R / 2.0)
    rho = t * np.arange(grid.n_radial + 1) / grid.n_radial
    ang = TWO_PI * np.arange(grid.n_angular) / grid.n_angular

    def sweep(rr, aa):
        zeta = (rr[:, None] * np.exp(1j * aa)[None, :]).ravel()
        w, om2 = ball_points(z, zeta)
        _, dF, omf2 = _eval_on(F, w, om2, backend)
        vals = om2 * np.abs(dF) / omf2
        k = int(np.argmax(vals))
        return float(vals[k]), abs(zeta[k]), float(np.angle(zeta[k]))

    best, r0, a0 = sweep(rho, ang)
    dr, da = t / grid.n_radial, TWO_PI / grid.n_angular
    rr = np.clip(np.linspace(r0 - dr, r0 + dr, grid.n_refine), 0.0, t)
    aa = np.linspace(a0 - da, a0 + da, grid.n_refine)
    best2, _, _ = sweep(rr, aa)
    return max(best, best2)


# -- condition (1e): preimage counts and containment radius -----------------------------


def preimage_count(F, ball: HyperbolicBall, q, max_nodes=1 << 16, backend=None) -> int:
    """Number of solutions of ``F(w) = q`` inside ``ball``, by the argument principle.

    The boundary circle is refined until every argument increment of ``F - q``
    is at most ``pi/4``.
    """
    q = check_disk(q, "q")
    z, t = ball.center, math.tanh(ball.radius / 2.0)
    n0 = max(64, 16 * F.degree)
    phi = TWO_PI * np.arange(n0) / n0
    while True:
        u = t * np.exp(1j * phi)
        den = 1.0 + np.conj(z) * u
        w = (u + z) / den
        om2 = one_minus_abs2(z) * (1.0 - t * t) / np.abs(den) ** 2
        Fw, _, _ = _eval_on(F, w, om2, backend)
        v = Fw - q
        if np.min(np.abs(v)) < PROXIMITY_TOL:
            raise BoundaryProximityError("target lies within 1e-9 of the boundary image; resample")
        dv = np.angle(np.roll(v, -1) / v)
        bad = np.abs(dv) > math.pi / 4
        if not bad.any():
            break
        if phi.size + int(bad.sum()) > max_nodes:
            raise NumericalFailure("argument-principle refinement exceeded the node budget")
        nxt = np.roll(phi, -1)
        nxt[-1] += TWO_PI
        phi = np.sort(np.concatenate([phi, 0.5 * (phi[bad] + nxt[bad])]))
    total = dv.sum() / TWO_PI
    count = int(round(total))
    if abs(total - count) > 1e-6:
        raise NumericalFailure("winding sum is not an integer")
    return count


def ball_containment_radius(
    F, z, R=1.0, resolution=1e-3, n_samples=256, n_curve=4096, ladder=32, backend=None
):
    """Largest ``c`` with every sampled point of ``|q - F(z)|_h = c`` covered by ``F(B_h(z, R))``.

    An ascending ladder on ``[0, R]`` finds the first uncovered circle, then
    bisection narrows it to ``resolution``. Points within 1e-9 of the boundary
    image count as uncovered.
    """
    z = check_disk(z)
    Fz = F.evaluate(z)
    curve = _image_curve(F, z, R, max(n_curve, 64 * max(F.degree, 1)), backend)

    def covered(c):
        q, _ = ball_boundary(Fz, c, n_samples)
        counts, dist = kernels.winding_numbers(curve, q, backend=backend)
        return bool(np.all((counts >= 1) & (dist > PROXIMITY_TOL)))

    lo, hi = 0.0, None
    for k in range(1, ladder + 1):
        c = R * k / ladder
        if covered(c):
            lo = c
        else:
            hi = c
            break
    if hi is None:
        return R
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if covered(mid):
            lo = mid
        else:
            hi = mid
    return lo


# -- condition (2): descent through Carleson squares -------------------------------------


@dataclass(frozen=True)
class DescentWitness:
    parent: DyadicSquare
    child: DyadicSquare
    depth: int
    ratio: float


def _center_defect(F, level, indices, backend=None):
    """``1 - |F(z_Q)|`` at the centers of the squares ``(level, indices)``, using exact gaps."""
    side = math.ldexp(1.0, -level)
    gap = np.full(indices.shape, 0.5 * side)
    z = (1.0 - gap) * np.exp(1j * TWO_PI * (indices + 0.5) * side)
    Fz, _, omf2 = F.evaluate_all(z, gap=gap, backend=backend)
    return _one_minus_abs(Fz, omf2)


def descent_search(F, q: DyadicSquare, eps, n_max=10, backend=None) -> Optional[DescentWitness]:
    """First descendant ``Q'`` (smallest depth, then index) with
    ``1 - |F(z_Q')| <= eps (1 - |F(z_Q)|)``, or ``None``."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    base = float(_center_defect(F, q.level, np.array([q.index]), backend)[0])
    for n in range(1, n_max + 1):
        level = q.level + n
        if level > MAX_DESCENT_LEVEL:
            break
        idx = (q.index << n) + np.arange(1 << n)
        ratio = _center_defect(F, level, idx, backend) / base
        ok = np.nonzero(ratio <= eps * (1.0 + DESCENT_RTOL))[0]
        if ok.size:
            j = int(ok[0])
            return DescentWitness(q, DyadicSquare(level, int(idx[j])), n, float(ratio[j]))
    return None


def descent_ratios(F, q: DyadicSquare, depth, backend=None):
    """Ratios ``(1-|F(z_Q')|)/(1-|F(z_Q)|)`` for all descendants at relative ``depth``."""
    base = float(_center_defect(F, q.level, np.array([q.index]), backend)[0])
    level = q.level + depth
    idx = (q.index << depth) + np.arange(1 << depth)
    return _center_defect(F, level, idx, backend) / base


def starting_square(z, base_level=BASE_LEVEL):
    """Dyadic square over ``arg z`` with ``1 - |z| < l(Q) <= 2(1 - |z|)``, clamped to ``base_level``."""
    z = check_disk(z)
    gap = 1.0 - abs(z)
    level = max(base_level, int(math.floor(-math.log2(gap))))
    while level > base_level and math.ldexp(1.0, -level) <= gap:
        level -= 1
    while math.ldexp(1.0, -level) > 2.0 * gap and math.ldexp(1.0, -(level + 1)) > gap:
        level += 1
    turns = (math.atan2(z.imag, z.real) / TWO_PI) % 1.0
    idx = min(int(turns * (1 << level)), (1 << level) - 1)
    return DyadicSquare(level, idx)


@dataclass(frozen=True)
class DescentChain:
    xi: float
    start: DyadicSquare
    squares: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)


def descent_chain(F, z, eps, chain_length, n_max=10, base_level=BASE_LEVEL, backend=None) -> DescentChain:
    """Nested squares ``Q_0 > Q_1 > ... > Q_n`` obtained by repeated :func:`descent_search`.

    ``squares`` lists ``Q_1 .. Q_n``; ``xi`` is the boundary angle under the
    midpoint of the last square. Raises :class:`DescentNotFound` with the
    partial chain when a step fails.
    """
    if chain_length < 0:
        raise ValueError("chain_length must be nonnegative")
    current = starting_square(z, base_level)
    start = current
    squares, witnesses = [], []
    for _ in range(chain_length):
        wit = descent_search(F, current, eps, n_max, backend)
        if wit is None:
            raise DescentNotFound(f"no descent witness below square {current.key}", [start] + squares)
        squares.append(wit.child)
        witnesses.append(wit)
        current = wit.child
    return DescentChain(current.mid_angle, start, squares, witnesses)


# -- condition (3): quasi-geodesic rays -----------------------------------------------------


@dataclass(frozen=True)
class QuasigeodesicFit:
    base: complex
    endpoint: float
    s: float
    C: float
    sample_count: int
    found: bool = True


def quasigeodesic_fit(F, z, xi, t_max, n_samples, c_cap=C_CAP, s_step=S_STEP, backend=None) -> QuasigeodesicFit:
    """Largest ``s`` (grid ``s_step .. 1``) for which ``d_h(F w_i, F w_j) >= s d_h(w_i, w_j) - C``
    holds on the sampled ray with the smallest admissible ``C <= c_cap``."""
    z = check_disk(z)
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    t = np.linspace(0.0, t_max, n_samples)
    boundary = complex(math.cos(xi), math.sin(xi))
    eta = (boundary - z) / (1.0 - np.conj(z) * boundary)
    zeta = np.tanh(t / 2.0) * (eta / abs(eta))
    w, om2 = ball_points(z, zeta)
    if np.max(np.abs(w)) >= 1.0 - 1e-12:
        raise PreconditionError("t_max takes the ray inside the admission margin")
    Fw, _, omf2 = _eval_on(F, w, om2, backend)
    dF = _pair_distances(Fw, omf2)
    dz = np.abs(t[:, None] - t[None, :])
    iu = np.triu_indices(n_samples, 1)
    dF, dz = dF[iu], dz[iu]
    s_grid = np.round(np.arange(1, int(round(1 / s_step)) + 1) * s_step, 12)
    for s in s_grid[::-1]:
        C = max(0.0, float(np.max(s * dz - dF)))
        if C <= c_cap:
            return QuasigeodesicFit(z, float(xi), float(s), C, n_samples)
    return QuasigeodesicFit(z, float(xi), 0.0, float("inf"), n_samples, found=False)


# -- Holder exponent -----------------------------------------------------------------------


class HolderRow(NamedTuple):
    r: float
    one_minus_r: float
    one_minus_abs_f: float
    ratio: float


class HolderEstimate(NamedTuple):
    s: float
    table: list


def holder_exponent(F, xi, r_ladder, backend=None) -> HolderEstimate:
    """Least-squares slope of ``log(1 - |F(r xi)|)`` against ``log(1 - r)``."""
    r = np.asarray(r_ladder, dtype=float)
    if r.size < 2 or np.any(np.diff(r) <= 0):
        raise ValueError("r_ladder must be increasing with at least two rungs")
    check_disk(r)
    gap = 1.0 - r
    Fw, _, omf2 = F.evaluate_all(r * np.exp(1j * xi), gap=gap, backend=backend)
    y = _one_minus_abs(Fw, omf2)
    s = float(np.polyfit(np.log(gap), np.log(y), 1)[0])
    table = [HolderRow(float(a), float(b), float(c), float(c / b)) for a, b, c in zip(r, gap, y)]
    return HolderEstimate(s, table)


# -- hyperbolic area function ----------------------------------------------------------------


def _dh2_on_circle(F, s, phi, backend):
    w = s * np.exp(1j * phi)
    gap = np.full(phi.shape, 1.0 - s)
    _, dF, omf2 = F.evaluate_all(w, gap=gap, backend=backend)
    return (one_minus_abs2(w, gap) * np.abs(dF) / omf2) ** 2


def _quad(fun, a, b, rtol=1e-9):
    if b <= a:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, *_ = integrate.quad(fun, a, b, epsabs=0.0, epsrel=1e-11, limit=400, full_output=1)
    if not np.isfinite(val) or err > rtol * max(abs(val), 1e-300):
        raise NumericalFailure(f"adaptive quadrature error estimate {err:.2e} exceeds tolerance")
    return val


def _area_function_once(F, theta, r, aperture, n_ang, backend):
    s_star = (aperture - 1.0) / (aperture + 1.0)
    x, wx = np.polynomial.legendre.leggauss(n_ang)
    trap = TWO_PI * np.arange(2 * n_ang) / (2 * n_ang)

    def full(s):
        return TWO_PI * _dh2_on_circle(F, s, trap, backend).mean() * s / (1.0 - s * s) ** 2

    x_star = -math.log1p(-s_star)

    def partial(uv):
        # x = x* + u^2 removes the square-root kink of psi at s*
        xv = x_star + uv * uv
        s = -math.expm1(-xv)
        e = math.exp(-xv)  # 1 - s
        kappa = (1.0 + s * s - aperture**2 * e * e) / (2.0 * s)
        psi = math.acos(min(1.0, max(-1.0, kappa)))
        vals = _dh2_on_circle(F, s, theta + psi * x, backend)
        return 2.0 * uv * psi * float(wx @ vals) * s * e / ((1.0 - s * s) ** 2)

    inner = _quad(full, 0.0, min(r, s_star))
    outer = 0.0
    if r > s_star:
        outer = _quad(partial, 0.0, math.sqrt(-math.log1p(-r) - x_star))
    return inner + outer


def hyperbolic_area_function(F, theta, r, aperture=2.0, n_angular=48, rtol=1e-8, backend=None):
    """``int D_h^2 F(z) dA(z) / (1 - |z|^2)^2`` over ``{|z| <= r, |z - e^{i theta}| <= aperture (1 - |z|)}``.

    The region is full circles up to ``|z| = (a-1)/(a+1)`` and a symmetric
    angular window beyond; the outer radial integral uses ``x = -log(1 - |z|) = x* + u^2``.
    """
    if not aperture > 1.0:
        raise ValueError("aperture must exceed 1")
    if not 0.0 <= r < 1.0:
        raise ValueError("r must lie in [0, 1)")
    check_disk(r)
    if r == 0.0:
        return 0.0
    a = _area_function_once(F, theta, r, aperture, n_angular, backend)
    b = _area_function_once(F, theta, r, aperture, 2 * n_angular, backend)
    if abs(a - b) > rtol * max(abs(b), 1e-300):
        raise NumericalFailure("angular quadrature did not converge")
    return b


# -- Gauss curvature equation -------------------------------------------------------------------


def _log_metric(F, w, backend=None):
    _, dF, omf2 = F.evaluate_all(w, backend=backend)
    return np.log(2.0 * np.abs(dF) / omf2)


def gauss_curvature_residual(F, z, h, backend=None):
    """Five-point Laplacian of ``u = log(2|F'|/(1-|F|^2))`` minus ``exp(2u)`` at ``z``; ``O(h^2)``."""
    z = check_disk(z)
    if not h > 0:
        raise ValueError("h must be positive")
    if abs(z) + h >= 1.0 - 1e-12:
        raise PreconditionError("stencil leaves the disk")
    crit = F.critical_points().points
    d_crit = float(distance_to_set(z, crit)[0])
    if d_crit <= 0.1:
        raise PreconditionError("point within hyperbolic distance 0.1 of a critical point")
    stencil = z + h * np.array([0, 1, -1, 1j, -1j])
    if crit.size and float(np.min(distance_to_set(stencil, crit))) <= 0.5 * d_crit:
        raise PreconditionError("stencil reaches into a critical-point neighborhood")
    u = _log_metric(F, stencil, backend)
    lap = (u[1:].sum() - 4.0 * u[0]) / (h * h)
    return float(lap - math.exp(2.0 * u[0]))


# -- condition (1f): distortion away from the critical set -------------------------------------


class ProfileEntry(NamedTuple):
    eps: float
    delta: float
    count: int
    argmin: Optional[complex]


def distortion_profile(F, eps_ladder, r_max=0.995, grid="dyadic", max_level=12, base_level=BASE_LEVEL,
                       step=0.05, backend=None):
    """For each ``eps``: min of ``D_h F`` over grid points with ``d_h(z, crit F) > eps``."""
    pts, gaps = center_grid(grid, r_max, max_level, base_level, step)
    keep = np.abs(pts) <= r_max
    pts, gaps = pts[keep], gaps[keep]
    dh = F.hyperbolic_derivative(pts, gap=gaps)
    dist = distance_to_set(pts, F.critical_points().points)
    out = []
    for eps in eps_ladder:
        sel = dist > eps
        if not sel.any():
            out.append(ProfileEntry(float(eps), float("nan"), 0, None))
            continue
        k = int(np.argmin(np.where(sel, dh, np.inf)))
        out.append(ProfileEntry(float(eps), float(dh[k]), int(sel.sum()), complex(pts[k])))
    return out


# -- Jensen balance ---------------------------------------------------------------------------


class JensenBalance(NamedTuple):
    circle_mean: float
    log_abs_derivative_at_0: float
    critical_sum: float
    identity_gap: float
    lhs: float
    rhs: float
    gap: float


def _deficit_integral(F, r, n_r, n_a, backend):
    # int_{|z|<r} (1 - D_h^2) dA / (1 - |z|), radial variable x = -log(1 - |z|)
    X = -math.log1p(-r)
    x, wx = np.polynomial.legendre.leggauss(n_r)
    xv = 0.5 * X * (x + 1.0)
    wv = 0.5 * X * wx
    s = -np.expm1(-xv)
    ang = TWO_PI * np.arange(n_a) / n_a
    w = (s[:, None] * np.exp(1j * ang)[None, :]).ravel()
    gap = np.repeat(np.exp(-xv), n_a)
    _, dF, omf2 = F.evaluate_all(w, gap=gap, backend=backend)
    dh2 = ((one_minus_abs2(w, gap) * np.abs(dF) / omf2) ** 2).reshape(s.size, n_a)
    return float((wv * s * (1.0 - dh2).mean(axis=1)).sum() * TWO_PI)


def jensen_balance(F, r, n_nodes=1 << 14, n_radial=64, rtol=1e-8, backend=None) -> JensenBalance:
    """Jensen's formula for ``log|F'|`` on ``|z| = r`` and both sides of the critical-set bound.

    ``identity_gap`` is circle mean minus ``log|F'(0)|`` minus the critical sum
    ``sum log(r/|c|)``. For the bound, ``F`` is first normalized by the
    automorphism sending ``F(0)`` to 0 (same critical set and ``D_h``), so
    ``lhs = sum log(1/|c|)``, ``rhs`` is the deficit integral plus
    ``log(1/|G'(0)|)``, and ``gap = lhs - rhs`` is the empirical constant.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    F0, dF0, omf0 = F.evaluate_all(np.array([0j]), backend=backend)
    if abs(dF0[0]) == 0.0:
        raise PreconditionError("F'(0) = 0")
    crit = F.critical_points().points
    mods = np.abs(crit)
    if mods.size and np.min(np.abs(mods - r)) <= 1e-6:
        raise PreconditionError("r lies within 1e-6 of a critical modulus")
    inside = mods[mods < r]
    circle = TWO_PI * np.arange(n_nodes) / n_nodes
    _, dFc, _ = F.evaluate_all(r * np.exp(1j * circle), backend=backend)
    circle_mean = float(np.mean(np.log(np.abs(dFc))))
    log0 = float(math.log(abs(dF0[0])))
    crit_sum = float(np.sum(np.log(r / inside)))
    ident = circle_mean - log0 - crit_sum

    lhs = float(np.sum(-np.log(inside)))
    n_a = 4 * n_radial
    prev = _deficit_integral(F, r, n_radial, n_a, backend)
    for _ in range(4):
        n_radial, n_a = 2 * n_radial, 2 * n_a
        cur = _deficit_integral(F, r, n_radial, n_a, backend)
        if abs(cur - prev) <= rtol * max(abs(cur), 1.0):
            break
        prev = cur
    else:
        raise NumericalFailure("deficit integral did not converge")
    g0 = abs(dF0[0]) / omf0[0]  # |G'(0)| for G = m_{F(0)} o F
    rhs = cur / TWO_PI - math.log(g0)
    return JensenBalance(circle_mean, log0, crit_sum, float(ident), lhs, float(rhs), float(lhs - rhs))
