# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. ``_fallback.py`` mirrors every function here."""

import numpy as np

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


def ryser_gray(const double complex[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef unsigned long long g, gray, last
    cdef double complex prod, total = 0
    cdef double sign = -1.0
    if n == 0:
        return 1 + 0j
    rowsum_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] rowsum = rowsum_arr
    last = 1ULL << n
    with nogil:
        for g in range(1, last):
            j = __builtin_ctzll(g)
            gray = g ^ (g >> 1)
            if (gray >> j) & 1:
                for i in range(n):
                    rowsum[i] = rowsum[i] + a[i, j]
            else:
                for i in range(n):
                    rowsum[i] = rowsum[i] - a[i, j]
            prod = rowsum[0]
            for i in range(1, n):
                prod = prod * rowsum[i]
            total = total + sign * prod
            sign = -sign
    if n % 2:
        total = -total
    return complex(total)


def tally_trials(const double[:, ::1] u, double herald_below, double multi_below,
                 Py_ssize_t n, bint resolving):
    """Count (valid, noisy, clean) trials from per-source uniforms.

    A source heralds when its uniform is below ``herald_below`` and carries
    two or more photons when below ``multi_below``.
    """
    cdef Py_ssize_t t, s, heralds, multi
    cdef Py_ssize_t shots = u.shape[0], sources = u.shape[1]
    cdef long long valid = 0, noisy = 0
    cdef double x
    with nogil:
        for t in range(shots):
            heralds = 0
            multi = 0
            for s in range(sources):
                x = u[t, s]
                if x < herald_below:
                    heralds += 1
                    if heralds > n:
                        break
                    if x < multi_below:
                        multi += 1
            if resolving:
                if multi == 0 and heralds == n:
                    valid += 1
            elif heralds == n:
                valid += 1
                if multi:
                    noisy += 1
    return valid, noisy, valid - noisy
