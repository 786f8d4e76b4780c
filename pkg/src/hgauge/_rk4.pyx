# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled RK4 kernel for the linear matrix ODE g' = -M(t) g."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline void _matmul(double[:, ::1] A, double[:, ::1] B, double[:, ::1] C, int d) noexcept nogil:
    cdef int i, j, l
    cdef double s
    for i in range(d):
        for j in range(d):
            s = 0.0
            for l in range(d):
                s += A[i, l] * B[l, j]
            C[i, j] = s


def rk4_linear(Mn, Mm, g0, double h):
    """Classic RK4 on a uniform grid; see the numpy fallback for the contract."""
    cdef double[:, :, ::1] mn = np.ascontiguousarray(Mn, dtype=np.float64)
    cdef double[:, :, ::1] mm = np.ascontiguousarray(Mm, dtype=np.float64)
    cdef int K = mm.shape[0]
    cdef int d = mm.shape[1]
    out_arr = np.empty((K + 1, d, d), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double[:, ::1] g = np.ascontiguousarray(g0, dtype=np.float64).copy()
    cdef double[:, ::1] k1 = np.empty((d, d))
    cdef double[:, ::1] k2 = np.empty((d, d))
    cdef double[:, ::1] k3 = np.empty((d, d))
    cdef double[:, ::1] k4 = np.empty((d, d))
    cdef double[:, ::1] tmp = np.empty((d, d))
    cdef int k, i, j
    cdef double half = 0.5 * h, sixth = h / 6.0
    with nogil:
        for i in range(d):
            for j in range(d):
                out[0, i, j] = g[i, j]
        for k in range(K):
            _matmul(mn[k], g, k1, d)
            for i in range(d):
                for j in range(d):
                    k1[i, j] = -k1[i, j]
                    tmp[i, j] = g[i, j] + half * k1[i, j]
            _matmul(mm[k], tmp, k2, d)
            for i in range(d):
                for j in range(d):
                    k2[i, j] = -k2[i, j]
                    tmp[i, j] = g[i, j] + half * k2[i, j]
            _matmul(mm[k], tmp, k3, d)
            for i in range(d):
                for j in range(d):
                    k3[i, j] = -k3[i, j]
                    tmp[i, j] = g[i, j] + h * k3[i, j]
            _matmul(mn[k + 1], tmp, k4, d)
            for i in range(d):
                for j in range(d):
                    g[i, j] = g[i, j] + sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] - k4[i, j])  # k4 not negated
                    out[k + 1, i, j] = g[i, j]
    return out_arr
