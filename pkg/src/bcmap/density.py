"""Separation and density statistics of finite point sets in the disk.

Critical sets and zero sets are passed as arrays of complex numbers; repeated
entries encode multiplicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .carleson import dyadic_centers
from .disk import ball_points, check_disk, one_minus_abs2, rho_to_dh

DEFAULT_A_LEVEL = 5
INNER_CUTOFF = 0.5


def _as_set(C):
    pts = np.atleast_1d(np.asarray(C, dtype=complex)).ravel()
    if pts.size:
        check_disk(pts, "point")
    return pts


def pairwise_distances(C):
    """Full matrix of hyperbolic distances (zero diagonal)."""
    pts = _as_set(C)
    zz = pts[:, None]
    den = np.abs(1.0 - np.conj(pts)[None, :] * zz) ** 2
    om = np.minimum(one_minus_abs2(zz) * one_minus_abs2(pts)[None, :] / den, 1.0)
    rho = np.abs(zz - pts[None, :]) / np.sqrt(den)
    return rho_to_dh(rho, om)


def separation_constant(C) -> float:
    """Minimum pairwise hyperbolic distance; ``inf`` for fewer than two points."""
    pts = _as_set(C)
    if pts.size < 2:
        return math.inf
    d = pairwise_distances(pts)
    return float(d[np.triu_indices(pts.size, 1)].min())


class QuasiSeparation(NamedTuple):
    bound: int
    count: int
    radius: float


def quasi_separation_count(C, radius=1.0) -> QuasiSeparation:
    """Bound on the number of points in any closed hyperbolic ball of the given radius.

    A ball of radius ``radius`` holding ``k`` points is contained in the ball of
    radius ``2 * radius`` about any of them, so the largest point-centered count at
    ``2 * radius`` is an upper bound. The point-centered count at ``radius`` is a
    lower bound and is reported alongside.
    """
    pts = _as_set(C)
    if pts.size == 0:
        return QuasiSeparation(0, 0, float(radius))
    d = pairwise_distances(pts)
    bound = int((d <= 2.0 * radius).sum(axis=1).max())
    count = int((d <= radius).sum(axis=1).max())
    return QuasiSeparation(bound, count, float(radius))


def _defects(pts, a=0j):
    """``1 - |m_a(c)|`` for every point, without cancellation."""
    if a == 0:
        return 1.0 - np.abs(pts)
    den = np.abs(1.0 - np.conj(a) * pts) ** 2
    om2 = one_minus_abs2(a) * one_minus_abs2(pts) / den
    w = np.abs(pts - a) / np.sqrt(den)
    return om2 / (1.0 + w)


def _partial_from_defects(defect, r):
    keep = (defect < 1.0 - INNER_CUTOFF) & (defect > 1.0 - r)
    return float(defect[keep].sum()) / math.log(1.0 / (1.0 - r))


def partial_density(C, r) -> float:
    """``sum_{1/2 < |c| < r} (1 - |c|) / log(1/(1 - r))``."""
    if not INNER_CUTOFF < r < 1.0:
        raise ValueError("r must lie in (1/2, 1)")
    pts = _as_set(C)
    if pts.size == 0:
        return 0.0
    return _partial_from_defects(_defects(pts), r)


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    r_ladder: np.ndarray
    a_grid: np.ndarray
    values: np.ndarray  # shape (len(r_ladder), len(a_grid))
    d_plus: float


def density_a_grid(level=DEFAULT_A_LEVEL, base_level=3):
    """Dyadic square centers for levels ``base_level .. level`` plus the origin."""
    pts, _, _ = dyadic_centers(base_level, level, include_origin=True)
    return pts


def default_r_ladder(r_max=1.0 - 1e-4, n=8):
    """Ladder with ``log(1/(1-r))`` equispaced from ``log 4`` to ``log(1/(1 - r_max))``."""
    return -np.expm1(-np.linspace(math.log(4.0), -math.log1p(-r_max), n))


def _local_probe(a, mesh, rings=4, spokes=12):
    """Points around ``a`` out to hyperbolic distance ``mesh``."""
    rad = np.tanh(0.5 * mesh * np.arange(1, rings + 1) / rings)
    ang = 2.0 * math.pi * np.arange(spokes) / spokes
    zeta = (rad[:, None] * np.exp(1j * ang)[None, :]).ravel()
    w, _ = ball_points(a, zeta)
    return w[np.abs(w) < 1.0 - 1e-9]


def uniform_upper_density(C, a_grid=None, r_ladder=None, refine_rounds=4, refine_top=4,
                          include_set=True) -> DensityEstimate:
    """Matrix of ``D(m_a(C), r)`` over the ``(r, a)`` grid.

    With ``include_set`` the points of ``C`` join the candidate centers; since
    ``m_{m(c)} o m`` is a rotation of ``m_c``, this part of the search is exactly
    Mobius equivariant.

    The sup over ``a`` is approximated by the grid plus ``refine_rounds`` rounds of
    local search (hyperbolic mesh halving from 1) around the ``refine_top`` best
    points at the top rung; refined points are appended to ``a_grid``.
    ``d_plus`` is the maximum over ``a`` at the top rung; no extrapolation toward
    ``r -> 1`` is attempted.
    """
    pts = _as_set(C)
    a_grid = density_a_grid() if a_grid is None else np.atleast_1d(np.asarray(a_grid, dtype=complex))
    check_disk(a_grid, "a")
    r_ladder = default_r_ladder() if r_ladder is None else np.asarray(r_ladder, dtype=float)
    if np.any(np.diff(r_ladder) <= 0) or r_ladder[0] <= INNER_CUTOFF:
        raise ValueError("r_ladder must be increasing inside (1/2, 1)")
    check_disk(r_ladder, "r")
    if pts.size == 0:
        return DensityEstimate(r_ladder, a_grid, np.zeros((r_ladder.size, a_grid.size)), 0.0)
    if include_set:
        a_grid = np.concatenate([a_grid, np.unique(pts)])

    def column(a):
        defect = _defects(pts, complex(a))
        return [_partial_from_defects(defect, r) for r in r_ladder]

    cols = [column(a) for a in a_grid]
    grid = list(a_grid)
    mesh = 1.0
    for _ in range(refine_rounds):
        top = np.argsort([-c[-1] for c in cols], kind="stable")[:refine_top]
        for k in top:
            for a in _local_probe(grid[k], mesh):
                grid.append(complex(a))
                cols.append(column(a))
        mesh *= 0.5
    values = np.array(cols).T
    return DensityEstimate(r_ladder, np.array(grid), values, float(values[-1].max()))
