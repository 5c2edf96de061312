# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: sequential Metropolis and small-chain Gibbs.

Must stay arithmetically identical to ``_kernels_py`` (same accumulation
order, same branch structure) so both backends give bit-identical results
from the same random inputs.
"""

from libc.math cimport exp

import numpy as np


cdef inline double _logistic(double x) nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


def metropolis_pattern_sweep(double[::1] v, double[:, ::1] patterns,
                             double[::1] overlaps, double beta,
                             long[::1] sites, double[::1] u):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t n_pat = patterns.shape[0]
    cdef double scale = 2.0 * beta / n
    cdef Py_ssize_t t, a, s
    cdef double vs, d_e, x
    cdef long accepted = 0
    with nogil:
        for t in range(sites.shape[0]):
            s = sites[t]
            vs = v[s]
            d_e = 0.0
            for a in range(n_pat):
                x = patterns[a, s]
                d_e += x * (vs * overlaps[a] - x)
            d_e *= scale
            if d_e <= 0.0 or u[t] < exp(-d_e):
                for a in range(n_pat):
                    overlaps[a] -= 2.0 * vs * patterns[a, s]
                v[s] = -vs
                accepted += 1
    return accepted


def gibbs_chain_small(double[:, ::1] weights, double[::1] vis_bias,
                      double[::1] hid_bias, double[::1] v, double[::1] h,
                      double[:, ::1] u, bint ising, counts):
    cdef Py_ssize_t n_vis = weights.shape[0]
    cdef Py_ssize_t n_hid = weights.shape[1]
    cdef Py_ssize_t n_sweeps = u.shape[0]
    cdef double hi = 1.0
    cdef double lo = -1.0 if ising else 0.0
    cdef double gain = 2.0 if ising else 1.0
    cdef Py_ssize_t t, i, a
    cdef double f, g
    cdef long idx
    cdef long[::1] cnt
    cdef bint tally = counts is not None
    if tally:
        cnt = counts
    for t in range(n_sweeps):
        for a in range(n_hid):
            f = hid_bias[a]
            for i in range(n_vis):
                f += v[i] * weights[i, a]
            h[a] = hi if u[t, a] < _logistic(gain * f) else lo
        for i in range(n_vis):
            g = vis_bias[i]
            for a in range(n_hid):
                g += weights[i, a] * h[a]
            v[i] = hi if u[t, n_hid + i] < _logistic(gain * g) else lo
        if tally:
            idx = 0
            for i in range(n_vis):
                if v[i] == hi:
                    idx += 1 << i
            for a in range(n_hid):
                if h[a] == hi:
                    idx += 1 << (n_vis + a)
            cnt[idx] += 1
    return None
