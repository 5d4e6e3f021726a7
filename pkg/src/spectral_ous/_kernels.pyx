# cython: language_level=3
"""Compiled hot loops: cyclic Jacobi sweeps and the xorshift64* stream."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdint cimport uint64_t

cnp.import_array()


cdef double _offdiag(double[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return sqrt(s)


def jacobi_sweeps(cnp.ndarray a_in, double rel_tol, int max_sweeps):
    """Run cyclic Jacobi sweeps on a copy of the symmetric matrix ``a_in``.

    Returns ``(diag, vectors, sweeps, off)``; the caller sorts and decides
    whether ``off`` is acceptable.
    """
    cdef cnp.ndarray[cnp.double_t, ndim=2] A_arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = A_arr.shape[0]
    cdef cnp.ndarray[cnp.double_t, ndim=2] V_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] A = A_arr
    cdef double[:, ::1] V = V_arr
    cdef Py_ssize_t p, q, k
    cdef double fro = 0.0, off, theta, t, c, s, akp, akq
    cdef int sweep = 0
    for p in range(n):
        for q in range(n):
            fro += A[p, q] * A[p, q]
    fro = sqrt(fro)
    off = _offdiag(A, n)
    with nogil:
        while off > rel_tol * fro and sweep < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if A[p, q] == 0.0:
                        continue
                    theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                    if fabs(theta) > 1e150:
                        t = 0.5 / theta
                    elif theta >= 0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(n):
                        akp = A[k, p]
                        akq = A[k, q]
                        A[k, p] = c * akp - s * akq
                        A[k, q] = s * akp + c * akq
                    for k in range(n):
                        akp = A[p, k]
                        akq = A[q, k]
                        A[p, k] = c * akp - s * akq
                        A[q, k] = s * akp + c * akq
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    for k in range(n):
                        akp = V[k, p]
                        akq = V[k, q]
                        V[k, p] = c * akp - s * akq
                        V[k, q] = s * akp + c * akq
            sweep += 1
            off = _offdiag(A, n)
    return np.diag(A_arr).copy(), V_arr, sweep, off


def xorshift_fill(uint64_t state, cnp.ndarray out_arr):
    """Fill ``out_arr`` with uniforms in [0, 1); return the advanced state."""
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef uint64_t x = state
    cdef uint64_t mult = 0x2545F4914F6CDD1DULL
    for i in range(out.shape[0]):
        x ^= x >> 12
        x ^= x << 25
        x ^= x >> 27
        out[i] = <double>((x * mult) >> 11) * (1.0 / 9007199254740992.0)
    return x
