# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels. Semantics mirror ``py_backend``."""

from libc.math cimport sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def project(x, lo, hi):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] lov = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[::1] hiv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double v
    for i in range(n):
        v = xv[i]
        if v < lov[i]:
            v = lov[i]
        elif v > hiv[i]:
            v = hiv[i]
        ov[i] = v
    return out


def weighted_mean(dirs, weights):
    cdef double[:, ::1] d = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t q = d.shape[0], n = d.shape[1], i, j
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double wi
    for i in range(q):
        wi = w[i]
        for j in range(n):
            ov[j] += wi * d[i, j]
    cdef double inv = 1.0 / q
    for j in range(n):
        ov[j] *= inv
    return out


cdef double _dist(double[::1] a, double[::1] b):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0, d
    for i in range(n):
        d = a[i] - b[i]
        s += d * d
    return sqrt(s)


def slide(s1, s2, double length, lo, hi, int max_steps, double tol=1e-12):
    cdef double[::1] p2 = np.ascontiguousarray(s1, dtype=np.float64)
    cdef double[::1] p1 = np.ascontiguousarray(s2, dtype=np.float64)
    cdef double[::1] lov = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[::1] hiv = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t n = p1.shape[0], i
    cdef double recovered = _dist(p1, p2)
    cdef int steps = 1
    cdef double norm, remaining, seg, scale, v
    path = [np.asarray(p1).copy()]
    cdef double[::1] cand
    while recovered < length - tol and steps < max_steps:
        norm = _dist(p1, p2)
        if norm < tol:
            break
        remaining = length - recovered
        scale = remaining / norm
        cand_arr = np.empty(n, dtype=np.float64)
        cand = cand_arr
        for i in range(n):
            v = p1[i] + scale * (p1[i] - p2[i])
            if v < lov[i]:
                v = lov[i]
            elif v > hiv[i]:
                v = hiv[i]
            cand[i] = v
        seg = _dist(cand, p1)
        if seg < tol:
            break
        recovered += seg
        steps += 1
        p2 = p1
        p1 = cand
        path.append(cand_arr)
    return np.asarray(p1).copy(), steps, recovered, path
