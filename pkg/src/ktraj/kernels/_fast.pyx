# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.  Signatures mirror ``_slow``."""

import numpy as np
from libc.math cimport sqrt, INFINITY
from libc.stdint cimport uint64_t


def speed_profile(double[::1] s, double[::1] kappa, double[::1] vcap, double a_max):
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t j
    cdef double a, c, ds, w, aa = a_max * a_max
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] v = out
    with nogil:
        v[0] = 0.0
        for j in range(n - 1):
            ds = s[j + 1] - s[j]
            c = kappa[j] * v[j] * v[j]
            a = aa - c * c
            a = sqrt(a) if a > 0 else 0.0
            w = sqrt(v[j] * v[j] + 2.0 * a * ds)
            v[j + 1] = w if w < vcap[j + 1] else vcap[j + 1]
        for j in range(n - 2, -1, -1):
            ds = s[j + 1] - s[j]
            c = kappa[j + 1] * v[j + 1] * v[j + 1]
            a = aa - c * c
            a = sqrt(a) if a > 0 else 0.0
            w = sqrt(v[j + 1] * v[j + 1] + 2.0 * a * ds)
            if w < v[j]:
                v[j] = w
    return out


def arrival_times(double[::1] s, double[::1] v):
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t j
    cdef double vs
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] t = out
    with nogil:
        t[0] = 0.0
        for j in range(n - 1):
            vs = v[j] + v[j + 1]
            if vs > 0:
                t[j + 1] = t[j] + 2.0 * (s[j + 1] - s[j]) / vs
            else:
                t[j + 1] = INFINITY
    return out


def fnv1a64(const unsigned char[::1] data):
    cdef uint64_t h = 0xcbf29ce484222325ULL
    cdef uint64_t prime = 0x100000001b3ULL
    cdef Py_ssize_t i, n = data.shape[0]
    with nogil:
        for i in range(n):
            h = (h ^ data[i]) * prime
    return int(h)
