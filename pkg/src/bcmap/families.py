"""Reference families of finite Blaschke products and matching evaluation grids."""
from __future__ import annotations

import math

import numpy as np

from .blaschke import BlaschkeProduct
from .carleson import DyadicSquare
from .disk import TWO_PI, ball_points


def exponential_zeros(depth):
    """The separated sequence ``1 - 2^-k`` for ``k = 1 .. depth``."""
    k = np.arange(1, depth + 1)
    return 1.0 - np.ldexp(1.0, -k)


def clustered_zeros(depth, pseudo_radius=0.05):
    """``depth`` distinct zeros on a small hyperbolic polygon around ``z_Q``, ``Q = (depth, 0)``.

    The cluster sits at the center of a dyadic square, so it approaches the
    boundary point 1 as ``depth`` grows.
    """
    c = DyadicSquare(depth, 0).center
    zeta = pseudo_radius * np.exp(1j * TWO_PI * np.arange(depth) / depth)
    w, _ = ball_points(c, zeta)
    return w


def exponential_family(depth):
    return BlaschkeProduct(exponential_zeros(depth))


def clustered_family(depth, pseudo_radius=0.05):
    return BlaschkeProduct(clustered_zeros(depth, pseudo_radius))


def random_zeros(rng, degree, r_max=0.95):
    """Zeros uniform by area in ``|z| <= r_max``."""
    r = r_max * np.sqrt(rng.uniform(0.0, 1.0, degree))
    return r * np.exp(1j * rng.uniform(0.0, TWO_PI, degree))


def random_product(rng, degree, r_max=0.95):
    """Random degree-``degree`` product with a random unimodular prefactor."""
    return BlaschkeProduct(random_zeros(rng, degree, r_max), float(rng.uniform(0.0, TWO_PI)))


def window_centers(max_level, base_level=3, width=4, angle=0.0):
    """Dyadic centers at every level whose squares lie within ``width`` squares of ``angle``.

    Returns ``(points, gaps)`` with exact radial gaps.
    """
    pts, gaps = [], []
    turns = (angle / TWO_PI) % 1.0
    for level in range(base_level, max_level + 1):
        n = 1 << level
        home = int(math.floor(turns * n))
        idx = sorted({(home + j) % n for j in range(-width, width + 1)})
        side = math.ldexp(1.0, -level)
        for i in idx:
            q = DyadicSquare(level, i)
            pts.append(q.center)
            gaps.append(0.5 * side)
    return np.array(pts, dtype=complex), np.array(gaps)
