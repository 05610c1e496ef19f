# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a drop-in twin in ``gfsc._fallback`` with the same
signature and semantics; ``gfsc._backend`` picks one at import time.
All loops release the GIL so independent trials can share threads.
"""
import numpy as np

from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc

ctypedef long long idx_t


cdef inline void _gather(const idx_t *indptr, const idx_t *indices, const double *isd,
                         const double *y, Py_ssize_t i, Py_ssize_t d,
                         double *buf) noexcept nogil:
    """buf = sum over neighbours j of isd[j] * y[j, :]."""
    cdef idx_t jj, j
    cdef double w
    cdef const double *row
    cdef Py_ssize_t c
    for c in range(d):
        buf[c] = 0.0
    for jj in range(indptr[i], indptr[i + 1]):
        j = indices[jj]
        w = isd[j]
        row = y + j * d
        for c in range(d):
            buf[c] += w * row[c]


def lap_matmat(const idx_t[::1] indptr, const idx_t[::1] indices,
               const double[::1] isd, const double[:, ::1] y,
               double[:, ::1] out):
    """out = D^-1/2 W D^-1/2 y for a 0/1 CSR adjacency W."""
    cdef Py_ssize_t n = y.shape[0], d = y.shape[1]
    cdef Py_ssize_t i, c
    cdef double s
    cdef double *o
    if n == 0 or d == 0:
        return
    with nogil:
        for i in range(n):
            o = &out[i, 0]
            _gather(&indptr[0], &indices[0], &isd[0], &y[0, 0], i, d, o)
            s = isd[i]
            for c in range(d):
                o[c] *= s


def cheb_step(const idx_t[::1] indptr, const idx_t[::1] indices,
              const double[::1] isd, const double[:, ::1] t1,
              double[:, ::1] t0, double[:, ::1] acc, double coef):
    """Advance the three-term recurrence in place.

    Overwrites ``t0`` with ``2 L t1 - t0``; when ``acc`` has rows, adds
    ``coef * t0_new`` to it.  Returns ``(<t0_new, t0_new>, <t0_new, t1>)``,
    the two inner products needed for Chebyshev moments.
    """
    cdef Py_ssize_t n = t1.shape[0], d = t1.shape[1]
    cdef Py_ssize_t i, c
    cdef double s, v
    cdef double sq = 0.0, cross = 0.0
    cdef bint accumulate = acc.shape[0] == n and coef != 0.0
    cdef double *row0
    cdef const double *row1
    cdef double *racc
    if n == 0 or d == 0:
        return 0.0, 0.0
    cdef double *buf = <double *> malloc(d * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                _gather(&indptr[0], &indices[0], &isd[0], &t1[0, 0], i, d, buf)
                s = 2.0 * isd[i]
                row0 = &t0[i, 0]
                row1 = &t1[i, 0]
                for c in range(d):
                    v = s * buf[c] - row0[c]
                    row0[c] = v
                    sq += v * v
                    cross += v * row1[c]
                if accumulate:
                    racc = &acc[i, 0]
                    for c in range(d):
                        racc[c] += coef * row0[c]
    finally:
        free(buf)
    return sq, cross


def jacobi_eigh(double[:, ::1] a, double tol=1e-14, int max_sweeps=60):
    """Cyclic row-by-row Jacobi on a symmetric matrix (overwritten).

    Returns ``(eigenvalues, eigenvectors, sweeps)`` in solver order.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef double apq, app, aqq, tau, t, c, s, arp, arq, off, frob
    cdef int sweep = 0
    v_arr = np.eye(n)
    cdef double[:, ::1] v = v_arr
    with nogil:
        frob = 0.0
        for p in range(n):
            for q in range(n):
                frob += a[p, q] * a[p, q]
        frob = sqrt(frob)
        while sweep < max_sweeps:
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += a[p, q] * a[p, q]
            if sqrt(2.0 * off) <= tol * frob or frob == 0.0:
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if fabs(apq) <= 1e-300:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    tau = (aqq - app) / (2.0 * apq)
                    if tau >= 0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for r in range(n):
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = c * arp - s * arq
                        a[r, q] = s * arp + c * arq
                    for r in range(n):
                        arp = a[p, r]
                        arq = a[q, r]
                        a[p, r] = c * arp - s * arq
                        a[q, r] = s * arp + c * arq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for r in range(n):
                        arp = v[r, p]
                        arq = v[r, q]
                        v[r, p] = c * arp - s * arq
                        v[r, q] = s * arp + c * arq
    w = np.array([a[i, i] for i in range(n)], dtype=np.float64)
    return w, v_arr, sweep
