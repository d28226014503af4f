# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: single-site Glauber stepping and categorical sampling.

Semantics match ``_kernels_py`` bit for bit; see that module for the
reference descriptions.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def sample_categorical(double[::1] cdf, double[::1] u):
    cdef Py_ssize_t m = cdf.shape[0]
    cdef Py_ssize_t count = u.shape[0]
    out_arr = np.empty(count, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef Py_ssize_t i, lo, hi, mid
    cdef double x
    with nogil:
        for i in range(count):
            x = u[i]
            lo = 0
            hi = m
            # upper bound: first index with cdf[idx] > x
            while lo < hi:
                mid = (lo + hi) >> 1
                if cdf[mid] <= x:
                    lo = mid + 1
                else:
                    hi = mid
            out[i] = <int>lo
    return out_arr


def sample_alias(double[::1] prob, int[::1] alias, double[::1] u):
    cdef Py_ssize_t m = prob.shape[0]
    cdef Py_ssize_t count = u.shape[0]
    out_arr = np.empty(count, dtype=np.int32)
    cdef int[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double x, frac
    cdef int idx
    with nogil:
        for i in range(count):
            x = u[i] * m
            idx = <int>x
            frac = x - idx
            out[i] = idx if frac < prob[idx] else alias[idx]
    return out_arr


def run_glauber_chains(cnp.int64_t[::1] indptr, int[::1] indices,
                       int[::1] degrees, double[:, ::1] p_table,
                       cnp.uint8_t[:, ::1] states, int[:, ::1] vidx,
                       double[:, ::1] u):
    cdef Py_ssize_t chains = vidx.shape[0]
    cdef Py_ssize_t steps = vidx.shape[1]
    cdef Py_ssize_t c, t
    cdef cnp.int64_t k
    cdef int v, a1
    with nogil:
        for c in range(chains):
            for t in range(steps):
                v = vidx[c, t]
                a1 = 0
                for k in range(indptr[v], indptr[v + 1]):
                    a1 += states[c, indices[k]]
                states[c, v] = 1 if u[c, t] < p_table[degrees[v], a1] else 0
