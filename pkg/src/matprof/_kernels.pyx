# cython: boundscheck=False, wraparound=False, cdivision=True, nonecheck=False
# cython: language_level=3
"""Compiled inner loops for the ordered (STOMP-style) profile engines.

Both kernels walk the upper triangle of the distance matrix row by row,
updating the running dot products with the diagonal recurrence and folding
each pair into both endpoints.  Ties keep the smaller neighbour index.
"""

from libc.math cimport sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _pair_distance(double qt, double mu_i, double mu_j,
                                  double sig_i, double sig_j,
                                  unsigned char flat_i, unsigned char flat_j,
                                  double m) nogil:
    cdef double r, rad
    if flat_i or flat_j:
        if flat_i and flat_j:
            return 0.0
        return sqrt(2.0 * m)
    r = (qt - (m * mu_i) * mu_j) / ((m * sig_i) * sig_j)
    if r > 1.0:
        r = 1.0
    elif r < -1.0:
        r = -1.0
    rad = 2.0 * m * (1.0 - r)
    if rad < 0.0:
        rad = 0.0
    return sqrt(rad)


def stomp_block(const double[::1] T, const double[::1] mu,
                const double[::1] sig, const unsigned char[::1] flat,
                const unsigned char[::1] valid, Py_ssize_t m, Py_ssize_t excl,
                double[::1] qt, Py_ssize_t row_start, Py_ssize_t row_end,
                double[::1] P, cnp.int64_t[::1] I):
    """Process rows ``[row_start, row_end)``; ``qt`` holds row ``row_start``."""
    cdef Py_ssize_t l = mu.shape[0]
    cdef Py_ssize_t i, j
    cdef double d, a, b, dm = <double>m
    with nogil:
        for i in range(row_start, row_end):
            if i > row_start:
                a = T[i - 1]
                b = T[i + m - 1]
                j = l - 1
                while j >= i:
                    qt[j] = qt[j - 1] - a * T[j - 1] + b * T[j + m - 1]
                    j -= 1
            if not valid[i]:
                continue
            for j in range(i + excl, l):
                if not valid[j]:
                    continue
                d = _pair_distance(qt[j], mu[i], mu[j], sig[i], sig[j],
                                   flat[i], flat[j], dm)
                if d < P[i] or (d == P[i] and j < I[i]):
                    P[i] = d
                    I[i] = j
                if d < P[j] or (d == P[j] and i < I[j]):
                    P[j] = d
                    I[j] = i


def mstomp_block(const double[:, ::1] T, const double[:, ::1] mu,
                 const double[:, ::1] sig, const unsigned char[:, ::1] flat,
                 const unsigned char[::1] incl, Py_ssize_t m,
                 Py_ssize_t excl, double[:, ::1] qt, Py_ssize_t row_start,
                 Py_ssize_t row_end, double[:, ::1] P, cnp.int64_t[:, ::1] I):
    """Multidimensional analogue of :func:`stomp_block`.

    For every admissible pair the per-dimension distances are ordered with
    included dimensions first and the rest ascending, then prefix-averaged.
    Rows ``k < n_include - 1`` are left untouched.
    """
    cdef Py_ssize_t d = mu.shape[0]
    cdef Py_ssize_t l = mu.shape[1]
    cdef Py_ssize_t i, j, k, s, t, n_inc = 0
    cdef double a, b, x, acc, v, dm = <double>m
    cdef double[::1] buf = np.empty(d, dtype=np.float64)
    for k in range(d):
        if incl[k]:
            n_inc += 1
    with nogil:
        for i in range(row_start, row_end):
            if i > row_start:
                for k in range(d):
                    a = T[k, i - 1]
                    b = T[k, i + m - 1]
                    j = l - 1
                    while j >= i:
                        qt[k, j] = qt[k, j - 1] - a * T[k, j - 1] + b * T[k, j + m - 1]
                        j -= 1
            for j in range(i + excl, l):
                s = 0
                acc = 0.0
                for k in range(d):
                    if incl[k]:
                        acc += _pair_distance(qt[k, j], mu[k, i], mu[k, j],
                                              sig[k, i], sig[k, j],
                                              flat[k, i], flat[k, j], dm)
                # insertion sort of the free dimensions
                for k in range(d):
                    if incl[k]:
                        continue
                    x = _pair_distance(qt[k, j], mu[k, i], mu[k, j],
                                       sig[k, i], sig[k, j],
                                       flat[k, i], flat[k, j], dm)
                    t = s
                    while t > 0 and buf[t - 1] > x:
                        buf[t] = buf[t - 1]
                        t -= 1
                    buf[t] = x
                    s += 1
                if n_inc > 0:
                    k = n_inc - 1
                    v = acc / (k + 1)
                    if v < P[k, i] or (v == P[k, i] and j < I[k, i]):
                        P[k, i] = v
                        I[k, i] = j
                    if v < P[k, j] or (v == P[k, j] and i < I[k, j]):
                        P[k, j] = v
                        I[k, j] = i
                for t in range(s):
                    acc += buf[t]
                    k = n_inc + t
                    v = acc / (k + 1)
                    if v < P[k, i] or (v == P[k, i] and j < I[k, i]):
                        P[k, i] = v
                        I[k, i] = j
                    if v < P[k, j] or (v == P[k, j] and i < I[k, j]):
                        P[k, j] = v
                        I[k, j] = i
