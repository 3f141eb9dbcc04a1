"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Used when the extension is not built or ``DRIVENBS_PURE_PYTHON`` is set.
Results match the compiled path: tallies exactly, permanents to rounding.
"""
import numpy as np


def ryser_gray(a):
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    cols = [a[:, j].copy() for j in range(n)]
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0j
    sign = -1.0
    for g in range(1, 1 << n):
        j = (g & -g).bit_length() - 1
        if ((g ^ (g >> 1)) >> j) & 1:
            rowsum += cols[j]
        else:
            rowsum -= cols[j]
        total += sign * complex(np.prod(rowsum))
        sign = -sign
    return -total if n % 2 else total


def tally_trials(u, herald_below, multi_below, n, resolving):
    u = np.asarray(u, dtype=np.float64)
    heralds = np.count_nonzero(u < herald_below, axis=1)
    multi = np.count_nonzero(u < multi_below, axis=1)
    if resolving:
        valid = int(np.count_nonzero((heralds == n) & (multi == 0)))
        return valid, 0, valid
    hit = heralds == n
    valid = int(np.count_nonzero(hit))
    noisy = int(np.count_nonzero(hit & (multi > 0)))
    return valid, noisy, valid - noisy
