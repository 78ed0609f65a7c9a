# cython: language_level=3
"""Compiled hot loops. Semantics mirror ``_fallback`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef double ALT_TOL = 1e-13


def lattice_mode_sums(const double complex[:, ::1] rho, Py_ssize_t d_a, Py_ssize_t d_b,
                      const double complex[::1] amps):
    cdef Py_ssize_t n, al, bt, row
    cdef double complex acc
    cdef double facc, w
    f = np.zeros(d_a, dtype=np.float64)
    q = np.zeros(d_a, dtype=np.complex128)
    cdef double[::1] fv = f
    cdef double complex[::1] qv = q
    for n in range(d_a):
        row = n * d_b
        facc = 0.0
        acc = 0.0
        for al in range(d_b):
            w = amps[al].real * amps[al].real + amps[al].imag * amps[al].imag
            facc = facc + w * rho[row + al, row + al].real
            for bt in range(d_b):
                if bt != al:
                    acc = acc + amps[al].conjugate() * amps[bt] * rho[row + al, row + bt]
        fv[n] = facc
        qv[n] = acc
    return f, q


def alternation_project(const double[:, ::1] values, int max_iter):
    cdef Py_ssize_t s_count = values.shape[0]
    cdef Py_ssize_t k = values.shape[1]
    cdef Py_ssize_t n = k + 1
    cdef Py_ssize_t s, j, free
    cdef double acc, r, step
    cdef int it
    out = np.empty((s_count, n), dtype=np.float64)
    iters = np.empty(s_count, dtype=np.int64)
    cdef double[:, ::1] q = out
    cdef long long[::1] itv = iters
    for s in range(s_count):
        acc = 0.0
        for j in range(k):
            q[s, j] = values[s, j]
            acc = acc + values[s, j]
        q[s, k] = -acc
        it = 0
        while True:
            for j in range(n):
                if q[s, j] > 1.0:
                    q[s, j] = 1.0
                elif q[s, j] < -1.0:
                    q[s, j] = -1.0
            r = 0.0
            for j in range(n):
                r = r + q[s, j]
            if fabs(r) <= ALT_TOL:
                break
            if it == max_iter:
                it = -1
                break
            free = 0
            for j in range(n):
                if (r > 0.0 and q[s, j] > -1.0) or (r < 0.0 and q[s, j] < 1.0):
                    free += 1
            if free == 0:
                it = -1
                break
            step = r / free
            for j in range(n):
                if (r > 0.0 and q[s, j] > -1.0) or (r < 0.0 and q[s, j] < 1.0):
                    q[s, j] = q[s, j] - step
            it += 1
        itv[s] = it
    return out, iters


def mean_abs_rows(const double[:, ::1] q):
    cdef Py_ssize_t s_count = q.shape[0]
    cdef Py_ssize_t n = q.shape[1]
    cdef Py_ssize_t s, j
    cdef double acc
    out = np.empty(s_count, dtype=np.float64)
    cdef double[::1] ov = out
    for s in range(s_count):
        acc = 0.0
        for j in range(n):
            acc = acc + fabs(q[s, j])
        ov[s] = acc / n
    return out
