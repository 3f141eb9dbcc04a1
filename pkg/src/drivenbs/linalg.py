"""Dense complex matrix helpers: permanents, Haar unitaries, Gram matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
"""
from __future__ import annotations

import functools
import itertools
import math

import numpy as np

from . import _backend
from .errors import DimensionError, SizeLimitError
from .rng import RandomSeed, as_seed

RYSER_MAX_N = 30
NAIVE_MAX_N = 10


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex128 array (C-contiguous)."""
    arr = np.ascontiguousarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("matrix entries must be finite")
    return arr


def _square(a) -> np.ndarray:
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"permanent needs a square matrix, got {arr.shape}")
    return arr


def permanent_ryser(a) -> complex:
    """Permanent by Ryser's formula with Gray-code column updates.

    Costs O(2**n * n). The permanent of the 0x0 matrix is 1.
    """
    arr = _square(a)
    if arr.shape[0] > RYSER_MAX_N:
        raise SizeLimitError(f"n={arr.shape[0]} exceeds the supported maximum {RYSER_MAX_N}")
    return complex(_backend.ryser_gray(arr))


def permanent_naive(a) -> complex:
    """Permanent as the explicit sum over all n! permutations (n <= 10)."""
    arr = _square(a)
    n = arr.shape[0]
    if n > NAIVE_MAX_N:
        raise SizeLimitError(f"naive permanent limited to n <= {NAIVE_MAX_N}, got {n}")
    if n == 0:
        return 1 + 0j
    perms = _permutation_table(n)
    return complex(arr[np.arange(n), perms].prod(axis=1).sum())


@functools.lru_cache(maxsize=NAIVE_MAX_N)
def _permutation_table(n: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    table.setflags(write=False)
    return table


def haar_unitary(m: int, rng: RandomSeed | int | None = None) -> np.ndarray:
    """Draw an m x m unitary from the Haar measure.

    QR-decomposes a complex Ginibre matrix and rescales each column of Q by
    the phase of the matching diagonal entry of R; without that rescaling the
    result is unitary but not Haar distributed.
    """
    if m < 1:
        raise DimensionError(f"unitary dimension must be >= 1, got {m}")
    gen = as_seed(rng).generator()
    z = (gen.standard_normal((m, m)) + 1j * gen.standard_normal((m, m))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return np.ascontiguousarray(q * (d / np.abs(d)))


def gram_matrix(cols) -> np.ndarray:
    """V^dagger V for a rectangular V."""
    v = as_matrix(cols)
    g = v.conj().T @ v
    return (g + g.conj().T) / 2


def unitarity_residual(u) -> float:
    """max |U^dagger U - I| entry."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))
