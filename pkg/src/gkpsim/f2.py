"""Small GF(2) linear-algebra helpers used by the code constructors and decoders."""

from __future__ import annotations

import numpy as np


def rank_f2(mat: np.ndarray) -> int:
    """Rank of a binary matrix over GF(2)."""
    a = np.array(mat, dtype=np.uint8, copy=True) % 2
    n_rows, n_cols = a.shape
    r = 0
    for c in range(n_cols):
        if r >= n_rows:
            break
        pivots = np.nonzero(a[r:, c])[0]
        if pivots.size == 0:
            continue
        piv = r + pivots[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        rows = np.nonzero(a[:, c])[0]
        rows = rows[rows != r]
        a[rows] ^= a[r]
        r += 1
    return r


def enumerate_group(generators: np.ndarray) -> np.ndarray:
    """All XOR combinations of the given independent binary generators.

    generators: (k, n) binary array. Returns a (2**k, n) uint8 array whose
    row j is the XOR of the generators selected by the bits of j.
    """
    gens = np.atleast_2d(np.asarray(generators, dtype=np.uint8)) % 2
    k, n = gens.shape
    if k == 0:
        return np.zeros((1, n), dtype=np.uint8)
    if k > 24:
        raise ValueError(f"group with 2^{k} elements is too large to enumerate")
    selectors = (np.arange(2**k, dtype=np.uint32)[:, None] >> np.arange(k)) & 1
    return (selectors.astype(np.uint8) @ gens) % 2


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack binary rows (..., n) with n <= 64 into uint64 words."""
    b = np.asarray(bits, dtype=np.uint64) % 2
    n = b.shape[-1]
    if n > 64:
        raise ValueError("pack_bits supports at most 64 columns")
    weights = (np.uint64(1) << np.arange(n, dtype=np.uint64))
    return (b * weights).sum(axis=-1, dtype=np.uint64)


def popcount_u64(words: np.ndarray) -> np.ndarray:
    """Per-element population count of a uint64 array."""
    return np.bitwise_count(np.asarray(words, dtype=np.uint64))
