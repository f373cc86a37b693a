"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_core`` module; selected
automatically when the extension is unavailable.
"""
import numpy as np

_CHUNK = 1 << 15  # elements per broadcast block; sized to stay in cache


def blaschke_eval(zeros, z, gap, phase, near_tol):
    """Evaluate a finite Blaschke product, its derivative and ``1 - |F|^2``.

    ``gap`` is ``1 - |z|`` (supplied separately so callers holding an exact
    radial gap keep full relative precision in ``1 - |F|^2``).
    """
    zeros = np.asarray(zeros, dtype=complex)
    z = np.asarray(z, dtype=complex)
    gap = np.asarray(gap, dtype=float)
    n = z.shape[0]
    d = zeros.shape[0]
    F = np.empty(n, dtype=complex)
    dF = np.empty(n, dtype=complex)
    omf2 = np.empty(n, dtype=float)
    if n == 0:
        return F, dF, omf2

    a = zeros[None, :]
    abar = np.conj(a)
    oma2 = ((1.0 - np.abs(zeros)) * (1.0 + np.abs(zeros)))[None, :]
    step = max(1, _CHUNK // max(d, 1))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        zz = z[lo:hi, None]
        omz2 = (gap[lo:hi] * (2.0 - gap[lo:hi]))[:, None]
        num = zz - a
        den = 1.0 - abar * zz
        m = num / den
        x = np.minimum(omz2 * oma2 / (den.real**2 + den.imag**2), 1.0)
        # 1 - prod(1 - x_k) as a sum of nonnegative terms; exact for one factor
        acc = np.zeros(hi - lo)
        for k in range(d):
            acc += x[:, k] * (1.0 - acc)
        omf2[lo:hi] = acc
        prod = phase * np.prod(m, axis=1)
        F[lo:hi] = prod
        absm = np.abs(m)
        near = absm.min(axis=1) < near_tol
        with np.errstate(divide="ignore", invalid="ignore"):
            g = (oma2 / (num * den)).sum(axis=1)
            deriv = prod * g
        if near.any():
            rows = np.nonzero(near)[0]
            mr = m[rows]
            dm = oma2 / den[rows] ** 2
            ones = np.ones((rows.size, 1), dtype=complex)
            prefix = np.cumprod(np.hstack([ones, mr[:, :-1]]), axis=1)
            suffix = np.cumprod(np.hstack([ones, mr[:, :0:-1]]), axis=1)[:, ::-1]
            deriv[rows] = phase * (dm * prefix * suffix).sum(axis=1)
        dF[lo:hi] = deriv
    return F, dF, omf2


def pairwise_min_omrho2(w, om2):
    """Minimum over pairs i<j of ``1 - rho(w_i, w_j)^2``."""
    w = np.asarray(w, dtype=complex)
    om2 = np.asarray(om2, dtype=float)
    n = w.shape[0]
    best = np.inf
    if n < 2:
        return best
    step = max(1, _CHUNK // n)
    wc = np.conj(w)
    for lo in range(0, n - 1, step):
        hi = min(n - 1, lo + step)
        den = 1.0 - wc[lo:hi, None] * w[None, :]
        x = om2[lo:hi, None] * om2[None, :] / (den.real**2 + den.imag**2)
        # keep strictly upper-triangular entries only
        cols = np.arange(n)[None, :]
        rows = np.arange(lo, hi)[:, None]
        x = np.where(cols > rows, x, np.inf)
        best = min(best, float(x.min()))
    return best


def pairwise_max_rho2(w):
    """Maximum over pairs of ``rho(w_i, w_j)^2``; accurate when all points are close."""
    w = np.asarray(w, dtype=complex)
    n = w.shape[0]
    best = 0.0
    if n < 2:
        return best
    step = max(1, _CHUNK // n)
    wc = np.conj(w)
    for lo in range(0, n - 1, step):
        hi = min(n - 1, lo + step)
        num = w[lo:hi, None] - w[None, :]
        den = 1.0 - wc[lo:hi, None] * w[None, :]
        x = (num.real**2 + num.imag**2) / (den.real**2 + den.imag**2)
        best = max(best, float(x.max()))
    return best


def winding_numbers(curve, q):
    """Winding number of the closed polyline ``curve`` about each point of ``q``.

    Also returns the distance from each ``q`` to the polyline.
    """
    curve = np.asarray(curve, dtype=complex)
    q = np.asarray(q, dtype=complex)
    nq = q.shape[0]
    counts = np.zeros(nq, dtype=np.int64)
    dist = np.full(nq, np.inf)
    if curve.shape[0] < 2 or nq == 0:
        return counts, dist
    x0, y0 = curve.real.copy(), curve.imag.copy()
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    sx, sy = x1 - x0, y1 - y0
    seglen2 = sx * sx + sy * sy
    inv = np.divide(1.0, seglen2, out=np.zeros_like(seglen2), where=seglen2 > 0)
    # real arrays rather than complex ones: this loop is memory bound
    step = max(1, _CHUNK // curve.shape[0])
    for lo in range(0, nq, step):
        hi = min(nq, lo + step)
        qx, qy = q.real[lo:hi, None], q.imag[lo:hi, None]
        ax, ay = x0 - qx, y0 - qy
        by = y1 - qy
        cross = ax * by - ay * (x1 - qx)
        up = (ay <= 0) & (by > 0) & (cross > 0)
        down = (by <= 0) & (ay > 0) & (cross < 0)
        counts[lo:hi] = up.sum(axis=1) - down.sum(axis=1)
        # foot of the perpendicular, clamped to the segment
        t = -(ax * sx + ay * sy) * inv
        np.clip(t, 0.0, 1.0, out=t)
        ax += t * sx
        ay += t * sy
        dist[lo:hi] = np.sqrt((ax * ax + ay * ay).min(axis=1))
    return counts, dist
