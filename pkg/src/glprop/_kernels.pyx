# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pairwise squared distances and the propagation
loop. Plain sequential C loops, so results are deterministic and bit-stable
across runs; the NumPy fallback in ``_kernels_py`` matches to rounding.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def pairwise_sq_distances(x):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t d = xv.shape[1]
    out_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, m
    cdef double acc, diff
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for m in range(d):
                    diff = xv[i, m] - xv[j, m]
                    acc += diff * diff
                out[i, j] = acc
                out[j, i] = acc
    return out_arr


def propagate_loop(y0, w, mix, lam, int max_iterations, double tolerance):
    """Iterate ``Y <- diag(1-lam) W Y mix + diag(lam) Y0`` until the
    Frobenius norm of the update drops below ``tolerance``; returns
    ``(Y, iterations_run, converged, final_delta)``."""
    cdef double[:, ::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)
    cdef double[:, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[:, ::1] mv = np.ascontiguousarray(mix, dtype=np.float64)
    cdef double[::1] lamv = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t n = y0v.shape[0]
    cdef Py_ssize_t k = y0v.shape[1]

    y_arr = np.array(y0, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] y = y_arr
    wy_arr = np.empty((n, k), dtype=np.float64)
    cdef double[:, ::1] wy = wy_arr
    nxt_arr = np.empty((n, k), dtype=np.float64)
    cdef double[:, ::1] nxt = nxt_arr

    cdef Py_ssize_t i, j, a, b
    cdef double acc, diff, sq_delta, keep, decay
    cdef double delta = 0.0
    cdef int iterations = 0
    cdef bint converged = False

    with nogil:
        while iterations < max_iterations:
            iterations += 1
            # wy = W @ Y
            for i in range(n):
                for j in range(k):
                    acc = 0.0
                    for a in range(n):
                        acc += wv[i, a] * y[a, j]
                    wy[i, j] = acc
            # nxt = diag(1-lam) (wy @ mix) + diag(lam) Y0, tracking ||nxt-y||_F
            sq_delta = 0.0
            for i in range(n):
                decay = 1.0 - lamv[i]
                keep = lamv[i]
                for j in range(k):
                    acc = 0.0
                    for b in range(k):
                        acc += wy[i, b] * mv[b, j]
                    acc = decay * acc + keep * y0v[i, j]
                    diff = acc - y[i, j]
                    sq_delta += diff * diff
                    nxt[i, j] = acc
            for i in range(n):
                for j in range(k):
                    y[i, j] = nxt[i, j]
            delta = sqrt(sq_delta)
            if delta < tolerance:
                converged = True
                break

    return y_arr, iterations, bool(converged), float(delta)
