"""Dyadic Carleson squares and discrete measures on the disk.

Arc lengths are normalized so the whole circle has measure 1. The dyadic
square ``(level, index)`` sits over the half-open arc
``[index / 2^level, (index + 1) / 2^level)`` and contains the points with
``1 - 2^-level < |z| < 1``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .disk import TWO_PI, check_disk, one_minus_abs2

BASE_LEVEL = 3
HEAVY_FRACTION = 1.0 / 100.0


@dataclass(frozen=True, order=True)
class DyadicSquare:
    level: int
    index: int

    def __post_init__(self):
        if self.level < 2:
            raise ValueError("dyadic squares need level >= 2 so that |I| < 1/2")
        if not 0 <= self.index < (1 << self.level):
            raise ValueError(f"index {self.index} out of range for level {self.level}")

    @property
    def side(self):
        """``l(Q) = |I| = 2^-level``."""
        return math.ldexp(1.0, -self.level)

    @property
    def arc(self):
        """Normalized arc endpoints ``(start, end)`` in ``[0, 1]``."""
        return self.index * self.side, (self.index + 1) * self.side

    @property
    def mid_angle(self):
        return TWO_PI * (self.index + 0.5) * self.side

    @property
    def center_gap(self):
        """``1 - |z_Q| = l(Q) / 2``, exact."""
        return 0.5 * self.side

    @property
    def center(self):
        """``z_Q = (1 - l/2) * xi_I``."""
        return (1.0 - self.center_gap) * complex(math.cos(self.mid_angle), math.sin(self.mid_angle))

    @property
    def key(self):
        return f"{self.level}:{self.index}"

    def children(self):
        return DyadicSquare(self.level + 1, 2 * self.index), DyadicSquare(self.level + 1, 2 * self.index + 1)

    def descendants(self, depth):
        """All descendants exactly ``depth`` levels down, in index order."""
        first = self.index << depth
        return [DyadicSquare(self.level + depth, first + j) for j in range(1 << depth)]

    def parent(self):
        return DyadicSquare(self.level - 1, self.index // 2)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        t = _turns(z)
        start, end = self.arc
        return (t >= start) & (t < end) & (np.abs(z) > 1.0 - self.side) & (np.abs(z) < 1.0)

    def is_descendant_of(self, other):
        if self.level < other.level:
            return False
        return (self.index >> (self.level - other.level)) == other.index


class SquareGeometry(NamedTuple):
    arc: tuple
    side: float
    mid_angle: float
    center: complex


def square_geometry(q: DyadicSquare) -> SquareGeometry:
    return SquareGeometry(q.arc, q.side, q.mid_angle, q.center)


def _turns(z):
    """Argument of ``z`` as a fraction of a full turn, in ``[0, 1)``."""
    t = np.mod(np.angle(z) / TWO_PI, 1.0)
    return np.where(t >= 1.0, 0.0, t)


@dataclass(frozen=True, eq=False)
class DiskMeasure:
    """Finite atomic measure ``sum mass_k * delta_{point_k}`` on the disk."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).ravel().copy()
        ms = np.atleast_1d(np.asarray(self.masses, dtype=float)).ravel().copy()
        if pts.shape != ms.shape:
            raise ValueError("points and masses must have equal length")
        if pts.size:
            check_disk(pts, "atom")
        if np.any(ms <= 0) or not np.all(np.isfinite(ms)):
            raise ValueError("masses must be positive and finite")
        pts.setflags(write=False)
        ms.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", ms)

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, dtype=complex), np.zeros(0))

    def __len__(self):
        return self.points.size

    @property
    def total_mass(self):
        return float(self.masses.sum())

    def rotated(self, angle):
        return DiskMeasure(self.points * np.exp(1j * angle), self.masses)


def zero_measure(F) -> DiskMeasure:
    """``sigma = sum (1 - |a_n|^2) delta_{a_n}``, one atom per zero (multiplicity kept)."""
    return DiskMeasure(F.zeros, one_minus_abs2(F.zeros))


def measure_of_square(sigma: DiskMeasure, q: DyadicSquare) -> float:
    if len(sigma) == 0:
        return 0.0
    return float(sigma.masses[q.contains(sigma.points)].sum())


def containing_squares(z, base_level=BASE_LEVEL, max_level=None):
    """Dyadic squares with ``base_level <= level <= max_level`` containing ``z`` (ancestor walk)."""
    z = complex(z)
    r = abs(z)
    if r == 0.0:
        return []
    t = float(_turns(z))
    gap = 1.0 - r
    # z in Q(level) iff 2^-level > 1 - |z|
    deepest = int(math.floor(-math.log2(gap))) if gap > 0 else 60
    while deepest >= 0 and math.ldexp(1.0, -deepest) <= gap:
        deepest -= 1
    while math.ldexp(1.0, -(deepest + 1)) > gap:
        deepest += 1
    if max_level is not None:
        deepest = min(deepest, max_level)
    out = []
    for level in range(base_level, deepest + 1):
        idx = min(int(math.floor(t * (1 << level))), (1 << level) - 1)
        out.append(DyadicSquare(level, idx))
    return out


def square_masses(sigma: DiskMeasure, base_level=BASE_LEVEL, max_level=24):
    """Map every nonempty dyadic square (levels in range) to its mass."""
    acc = defaultdict(float)
    for p, m in zip(sigma.points, sigma.masses):
        for q in containing_squares(p, base_level, max_level):
            acc[q] += m
    return dict(acc)


def carleson_constant(sigma: DiskMeasure, max_level, base_level=BASE_LEVEL):
    """``max sigma(Q)/l(Q)`` over dyadic squares with ``base_level <= level <= max_level``.

    Returns ``(value, witness)``; the witness is ``None`` for an empty measure.
    """
    if max_level < base_level:
        raise ValueError("max_level must be >= base_level")
    masses = square_masses(sigma, base_level, max_level)
    if not masses:
        return 0.0, None
    witness = max(masses, key=lambda q: (masses[q] / q.side, -q.level, -q.index))
    return masses[witness] / witness.side, witness


def balayage(sigma: DiskMeasure, z) -> float:
    """``sum mass * (1 - |z|^2) / |1 - conj(z) w|^2`` over the atoms ``w``."""
    z = check_disk(z)
    if len(sigma) == 0:
        return 0.0
    w = sigma.points
    return float((sigma.masses * one_minus_abs2(z) / np.abs(1.0 - np.conj(z) * w) ** 2).sum())


def _balayage_at_center(sigma, q):
    # uses the exact radial gap of z_Q
    if len(sigma) == 0:
        return 0.0
    zq = q.center
    omz2 = one_minus_abs2(zq, q.center_gap)
    return float((sigma.masses * omz2 / np.abs(1.0 - np.conj(zq) * sigma.points) ** 2).sum())


class HeavyTest(NamedTuple):
    heavy: bool
    margin: float
    density: float
    balayage: float


def is_heavy_square(sigma: DiskMeasure, q: DyadicSquare) -> HeavyTest:
    """Heavy iff ``sigma(Q)/l(Q) >= balayage(z_Q) / 100`` and ``sigma(Q) > 0``."""
    dens = measure_of_square(sigma, q) / q.side
    bal = _balayage_at_center(sigma, q)
    margin = dens - HEAVY_FRACTION * bal
    return HeavyTest(bool(dens > 0.0 and margin >= 0.0), margin, dens, bal)


class LightSquare(NamedTuple):
    square: DyadicSquare
    delta: float
    ratio: float


def light_subsquare_search(sigma: DiskMeasure, q: DyadicSquare, eps, max_depth):
    """Shallowest descendant ``Q'`` with ``sigma(Q')/l(Q') <= eps * sigma(Q)/l(Q)``.

    Depth 0 (``Q`` itself) is allowed. Within a depth the smallest ratio wins,
    then the smallest index. Returns a :class:`LightSquare` or ``None``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    parent = measure_of_square(sigma, q) / q.side
    threshold = eps * parent
    inside = q.contains(sigma.points) if len(sigma) else np.zeros(0, dtype=bool)
    pts, ms = sigma.points[inside], sigma.masses[inside]
    for depth in range(max_depth + 1):
        level = q.level + depth
        side = math.ldexp(1.0, -level)
        mass = np.zeros(1 << depth)
        if pts.size:
            deep = np.abs(pts) > 1.0 - side
            idx = np.floor(_turns(pts[deep]) * (1 << level)).astype(np.int64) - (q.index << depth)
            idx = np.clip(idx, 0, (1 << depth) - 1)
            np.add.at(mass, idx, ms[deep])
        dens = mass / side
        ok = np.nonzero(dens <= threshold)[0]
        if ok.size:
            j = int(ok[np.argmin(dens[ok])])
            sq = DyadicSquare(level, (q.index << depth) + j)
            ratio = dens[j] / parent if parent > 0 else 0.0
            return LightSquare(sq, math.ldexp(1.0, -depth), float(ratio))
    return None


def dyadic_centers(base_level=BASE_LEVEL, max_level=12, r_max=None, include_origin=True):
    """Centers ``z_Q`` of all dyadic squares in the level range (optionally ``|z_Q| <= r_max``).

    Returns ``(points, gaps, squares)``; ``squares[k]`` is ``None`` for the origin.
    """
    pts, gaps, squares = [], [], []
    if include_origin:
        pts.append(0j)
        gaps.append(1.0)
        squares.append(None)
    for level in range(base_level, max_level + 1):
        side = math.ldexp(1.0, -level)
        if r_max is not None and 1.0 - side / 2 > r_max:
            break
        for idx in range(1 << level):
            q = DyadicSquare(level, idx)
            pts.append(q.center)
            gaps.append(q.center_gap)
            squares.append(q)
    return np.array(pts, dtype=complex), np.array(gaps), squares
