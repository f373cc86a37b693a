# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Semantics mirror ``bcmap._fallback`` exactly."""
import numpy as np

from libc.math cimport sqrt, INFINITY


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


def blaschke_eval(const double complex[::1] zeros, const double complex[::1] z,
                  const double[::1] gap, double complex phase, double near_tol):
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t d = zeros.shape[0]
    cdef Py_ssize_t i, k, j
    F_arr = np.empty(n, dtype=np.complex128)
    dF_arr = np.empty(n, dtype=np.complex128)
    omf2_arr = np.empty(n, dtype=np.float64)
    cdef double complex[::1] F = F_arr
    cdef double complex[::1] dF = dF_arr
    cdef double[::1] omf2 = omf2_arr

    oma2_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] oma2 = oma2_arr
    cdef double r
    for k in range(d):
        r = sqrt(cabs2(zeros[k]))
        oma2[k] = (1.0 - r) * (1.0 + r)

    m_arr = np.empty(d, dtype=np.complex128)
    den_arr = np.empty(d, dtype=np.complex128)
    cdef double complex[::1] m = m_arr
    cdef double complex[::1] den = den_arr

    cdef double complex zi, num, prod, g, term, s
    cdef double omz2, x, acc, am2, minabs2
    cdef double near2 = near_tol * near_tol

    with nogil:
        for i in range(n):
            zi = z[i]
            omz2 = gap[i] * (2.0 - gap[i])
            prod = phase
            g = 0.0
            acc = 0.0
            minabs2 = INFINITY
            for k in range(d):
                num = zi - zeros[k]
                den[k] = 1.0 - zeros[k].conjugate() * zi
                m[k] = num / den[k]
                am2 = cabs2(m[k])
                if am2 < minabs2:
                    minabs2 = am2
                x = omz2 * oma2[k] / cabs2(den[k])
                if x > 1.0:
                    x = 1.0
                # 1 - prod(1 - x_k) as a sum of nonnegative terms; exact for one factor
                acc = acc + x * (1.0 - acc)
                prod = prod * m[k]
                if am2 > 0.0:
                    g = g + oma2[k] / (num * den[k])
            F[i] = prod
            omf2[i] = acc
            if minabs2 < near2:
                s = 0.0
                for k in range(d):
                    term = phase * oma2[k] / (den[k] * den[k])
                    for j in range(d):
                        if j != k:
                            term = term * m[j]
                    s = s + term
                dF[i] = s
            else:
                dF[i] = prod * g
    return F_arr, dF_arr, omf2_arr


def pairwise_min_omrho2(const double complex[::1] w, const double[::1] om2):
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = INFINITY
    cdef double x
    cdef double complex wi
    with nogil:
        for i in range(n):
            wi = w[i].conjugate()
            for j in range(i + 1, n):
                x = om2[i] * om2[j] / cabs2(1.0 - wi * w[j])
                if x < best:
                    best = x
    return best


def pairwise_max_rho2(const double complex[::1] w):
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = 0.0
    cdef double x
    cdef double complex wi, wc
    with nogil:
        for i in range(n):
            wi = w[i]
            wc = wi.conjugate()
            for j in range(i + 1, n):
                x = cabs2(wi - w[j]) / cabs2(1.0 - wc * w[j])
                if x > best:
                    best = x
    return best


def winding_numbers(const double complex[::1] curve, const double complex[::1] q):
    cdef Py_ssize_t nc = curve.shape[0]
    cdef Py_ssize_t nq = q.shape[0]
    cdef Py_ssize_t i, k
    counts_arr = np.zeros(nq, dtype=np.int64)
    dist_arr = np.full(nq, np.inf)
    if nc < 2:
        return counts_arr, dist_arr
    cdef long long[::1] counts = counts_arr
    cdef double[::1] dist = dist_arr
    cdef double complex p0, p1, seg, foot
    cdef double cross, t, l2, dd, best
    cdef long long wn
    with nogil:
        for i in range(nq):
            wn = 0
            best = INFINITY
            for k in range(nc):
                p0 = curve[k] - q[i]
                if k + 1 < nc:
                    p1 = curve[k + 1] - q[i]
                else:
                    p1 = curve[0] - q[i]
                cross = p0.real * p1.imag - p0.imag * p1.real
                if p0.imag <= 0.0:
                    if p1.imag > 0.0 and cross > 0.0:
                        wn += 1
                else:
                    if p1.imag <= 0.0 and cross < 0.0:
                        wn -= 1
                seg = p1 - p0
                l2 = cabs2(seg)
                if l2 > 0.0:
                    t = -(p0.real * seg.real + p0.imag * seg.imag) / l2
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                else:
                    t = 0.0
                foot = p0 + t * seg
                dd = cabs2(foot)
                if dd < best:
                    best = dd
            counts[i] = wn
            dist[i] = sqrt(best)
    return counts_arr, dist_arr
