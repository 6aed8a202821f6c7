# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: the exact subset sweep and the permutation walk.

Semantics are identical to the pure-Python versions in ``_kernels_py``; the
benchmark script compares the two.
"""

import numpy as np


def backend_name():
    return "cython"


def exact_shapley_from_table(
    double[::1] table,
    double[::1] size_weights,
    unsigned char[::1] popcounts,
    int n,
):
    """Per-player Shapley values from a dense 2^n table of game values.

    ``size_weights[s]`` is the Shapley weight for a coalition of size ``s``;
    ``popcounts[m]`` is the popcount of mask ``m``.
    """
    cdef Py_ssize_t total = (<Py_ssize_t>1) << n
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] phi = out
    cdef Py_ssize_t m, bit
    cdef int i
    cdef double base, w
    for m in range(total):
        base = table[m]
        w = size_weights[popcounts[m]]
        for i in range(n):
            bit = (<Py_ssize_t>1) << i
            if not (m & bit):
                phi[i] += w * (table[m | bit] - base)
    return out


def permutation_marginals(double[::1] table, long long[:, ::1] perms, int n):
    """Accumulate per-player marginal-contribution sums over permutations.

    Returns ``(sums, sumsqs)`` arrays of length ``n``: for each player, the
    sum and sum of squares of its marginal contribution across the given
    permutations.
    """
    cdef Py_ssize_t rows = perms.shape[0]
    sums_arr = np.zeros(n, dtype=np.float64)
    sq_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] sums = sums_arr
    cdef double[::1] sumsqs = sq_arr
    cdef Py_ssize_t r, mask
    cdef int j, player
    cdef double prev, cur, d
    for r in range(rows):
        mask = 0
        prev = table[0]
        for j in range(n):
            player = <int>perms[r, j]
            mask |= (<Py_ssize_t>1) << player
            cur = table[mask]
            d = cur - prev
            sums[player] += d
            sumsqs[player] += d * d
            prev = cur
    return sums_arr, sq_arr
