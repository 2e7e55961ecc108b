"""
Arithmetic sieve arrays for coefficient generation.

Provides:
- Dirichlet convolution of two arithmetic arrays
- divisor functions d_n(m) as iterated convolutions of the constant 1
- smallest-prime-factor table (used by multiplicativity checks)

Arrays are indexed by m, index 0 is unused and kept at zero.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def dirichlet_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Dirichlet convolution (f * g)(m) = Σ_{de=m} f(d) g(e), m ≤ M.

    Only d ≤ √M is looped over; every factorisation m = de has
    min(d, e) ≤ √M, so each pair is booked once from the smaller side.
    """
    if f.shape != g.shape:
        raise ValueError("convolution arrays must share a length")
    M = f.shape[0] - 1
    out_dtype = np.result_type(f.dtype, g.dtype)
    out = np.zeros(M + 1, dtype=out_dtype)
    if M < 1:
        return out
    root = math.isqrt(M)
    for d in range(1, root + 1):
        e = np.arange(d, M // d + 1)
        if e.size == 0:
            continue
        idx = d * e
        if f[d] != 0:
            out[idx] += f[d] * g[e]
        if g[d] != 0 and e.size > 1:
            out[idx[1:]] += g[d] * f[e[1:]]
    return out


@lru_cache(maxsize=8)
def _divisor_table_cached(M: int, n: int) -> np.ndarray:
    ones = np.ones(M + 1, dtype=np.float64)
    ones[0] = 0.0
    table = ones.copy()
    for _ in range(n - 1):
        table = dirichlet_convolve(table, ones)
    table.setflags(write=False)
    return table


def divisor_table(M: int, n: int) -> np.ndarray:
    """d_n(m) for 0 ≤ m ≤ M (read-only array)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _divisor_table_cached(int(M), int(n))


def smallest_prime_factor(M: int) -> np.ndarray:
    spf = np.zeros(M + 1, dtype=np.int64)
    if M >= 1:
        spf[1] = 1
    for i in range(2, math.isqrt(M) + 1):
        if spf[i] == 0:
            block = spf[i * i :: i]
            block[block == 0] = i
    rest = np.nonzero(spf == 0)[0]
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return spf


__all__ = ["dirichlet_convolve", "divisor_table", "smallest_prime_factor"]
