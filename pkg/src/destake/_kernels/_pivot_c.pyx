# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pivot-counting kernel.

Mirrors _pivot_py bit-for-bit: same splitmix64 substream layout keyed by
(seed, permutation, step), same lazy Fisher-Yates walk, same accumulation
order.  The win over the numpy twin is early exit: a permutation stops at its
pivot instead of being generated in full.
"""

from libc.stdint cimport int32_t, int64_t, uint64_t

import numpy as np

cdef uint64_t GOLDEN = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t MIX_A = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MIX_B = <uint64_t>0x94D049BB133111EB


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


def pivot_counts(weights, double threshold, bint strict, long long n_samples, seed):
    """Count, per validator, the sampled permutations in which it is pivotal."""
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t m = w.shape[0]
    counts_arr = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    perm_arr = np.empty(m, dtype=np.int32)
    cdef int32_t[::1] perm = perm_arr

    cdef uint64_t s0 = mix64((<uint64_t>(int(seed) & ((1 << 64) - 1))) + GOLDEN)
    cdef uint64_t key, x
    cdef long long j
    cdef Py_ssize_t t, r, i
    cdef int32_t tmp, arrived
    cdef double acc
    cdef bint crossed, found_all = True

    with nogil:
        for j in range(n_samples):
            key = mix64(s0 ^ ((<uint64_t>(j + 1)) * GOLDEN))
            for i in range(m):
                perm[i] = <int32_t>i
            acc = 0.0
            crossed = False
            for t in range(m):
                x = mix64(key + (<uint64_t>(t + 1)) * GOLDEN)
                r = t + <Py_ssize_t>(x % (<uint64_t>(m - t)))
                tmp = perm[t]
                perm[t] = perm[r]
                perm[r] = tmp
                arrived = perm[t]
                acc += w[arrived]
                if strict:
                    crossed = acc > threshold
                else:
                    crossed = acc >= threshold
                if crossed:
                    counts[arrived] += 1
                    break
            if not crossed:
                found_all = False
                break
    if not found_all:
        raise AssertionError("threshold never crossed; threshold must be < total weight")
    return counts_arr
