# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: direct-summation convolution and weighted power sums."""

import numpy as np

from libc.math cimport log, pow


def direct_convolve_1d(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    cdef Py_ssize_t i, j
    cdef double ai
    out = np.zeros(na + nb - 1)
    cdef double[::1] o = out
    for i in range(na):
        ai = a[i]
        if ai == 0.0:
            continue
        for j in range(nb):
            o[i + j] += ai * b[j]
    return out


def direct_convolve_2d(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t na0 = a.shape[0], na1 = a.shape[1]
    cdef Py_ssize_t nb0 = b.shape[0], nb1 = b.shape[1]
    cdef Py_ssize_t i0, i1, j0, j1
    cdef double aij
    out = np.zeros((na0 + nb0 - 1, na1 + nb1 - 1))
    cdef double[:, ::1] o = out
    for i0 in range(na0):
        for i1 in range(na1):
            aij = a[i0, i1]
            if aij == 0.0:
                continue
            for j0 in range(nb0):
                for j1 in range(nb1):
                    o[i0 + j0, i1 + j1] += aij * b[j0, j1]
    return out


def power_sum(const double[::1] values, const double[::1] weights, double p):
    """Sum of ``weights * values**p``; zero values contribute nothing."""
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double acc = 0.0, v
    for i in range(n):
        v = values[i]
        if v > 0.0:
            acc += weights[i] * pow(v, p)
    return acc


def xlogx_sum(const double[::1] values, const double[::1] weights):
    cdef Py_ssize_t i, n = values.shape[0]
    cdef double acc = 0.0, v
    for i in range(n):
        v = values[i]
        if v > 0.0:
            acc += weights[i] * v * log(v)
    return acc
