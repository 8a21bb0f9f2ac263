# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: outcome sampling, coincidence counting, strategy scans.

Must stay bit-identical to ``_kernels_fallback``; see that module for the
contracts.
"""

import numpy as np

BACKEND_NAME = "cython"

cdef extern from *:
    int __builtin_popcountll(unsigned long long x)


def map_outcomes(const double[:, ::1] cum, const long long[::1] pair_idx,
                 const double[::1] u):
    cdef Py_ssize_t n = pair_idx.shape[0]
    out_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef Py_ssize_t i
    cdef long long p
    cdef double x
    cdef int o
    for i in range(n):
        p = pair_idx[i]
        x = u[i]
        o = 0
        if x >= cum[p, 0]:
            o += 1
        if x >= cum[p, 1]:
            o += 1
        if x >= cum[p, 2]:
            o += 1
        out[i] = <unsigned char> o
    return out_arr


def count_outcomes(const long long[::1] pair_idx, const unsigned char[::1] outcome_idx,
                   Py_ssize_t n_pairs):
    counts_arr = np.zeros((n_pairs, 4), dtype=np.int64)
    cdef long long[:, ::1] counts = counts_arr
    cdef Py_ssize_t i, n = pair_idx.shape[0]
    for i in range(n):
        counts[pair_idx[i], outcome_idx[i]] += 1
    return counts_arr


def lhv_scan(int n):
    cdef unsigned long long total = 1ULL << (2 * n)
    cdef unsigned long long mask = (1ULL << n) - 1
    cdef unsigned long long madj = (1ULL << (n - 1)) - 1
    cdef unsigned long long s, a, b, best_s = 0
    cdef int best = 2 * n + 1
    cdef int val
    for s in range(total):
        a = s >> n
        b = s & mask
        val = <int> (((a ^ (b >> (n - 1))) & 1ULL) ^ 1ULL)
        val += __builtin_popcountll(a ^ b)
        val += __builtin_popcountll((b ^ (a >> 1)) & madj)
        if val < best:
            best = val
            best_s = s
    return best, int(best_s)
