"""Vectorized numpy equivalents of the compiled kernels (same outputs, bit for bit)."""

from __future__ import annotations

import numpy as np


def unique_rows(rows):
    if rows.shape[0] == 0:
        return rows[:0].copy(), np.empty(0, dtype=np.int64)
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    return uniq, inverse.reshape(-1).astype(np.int64, copy=False)


def cr_rows(indptr, indices, colors, start, stop, width):
    m = stop - start
    out = np.full((m, width), -1, dtype=np.int64)
    out[:, 0] = colors[start:stop]
    if m == 0 or width == 1:
        return out
    lo = indptr[start:stop]
    deg = indptr[start + 1:stop + 1] - lo
    slot = np.arange(width - 1)
    mask = slot[None, :] < deg[:, None]
    pos = np.where(mask, lo[:, None] + slot[None, :], 0)
    big = np.iinfo(np.int64).max
    vals = np.where(mask, colors[indices[pos]] if indices.size else big, big)
    vals.sort(axis=1)
    vals[vals == big] = -1
    out[:, 1:] = vals
    return out


def wl2_rows(C, K, start, stop):
    n = C.shape[0]
    codes = C[start:stop, None, :] * K + C.T[None, :, :]
    codes.sort(axis=2)
    out = np.empty((stop - start, n, n + 1), dtype=np.int64)
    out[:, :, 0] = C[start:stop]
    out[:, :, 1:] = codes
    return out.reshape(-1, n + 1)


def wlk_rows(C, n, k, K, start, stop):
    t = np.arange(start, stop, dtype=np.int64)
    powers = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    digits = (t[:, None] // powers[None, :]) % n
    y = np.arange(n, dtype=np.int64)
    sub = t[:, None, None] + (y[None, :, None] - digits[:, None, :]) * powers[None, None, :]
    cols = C[sub]
    codes = np.zeros(cols.shape[:2], dtype=np.int64)
    for i in range(k):
        codes = codes * K + cols[:, :, i]
    codes.sort(axis=1)
    out = np.empty((stop - start, n + 1), dtype=np.int64)
    out[:, 0] = C[start:stop]
    out[:, 1:] = codes
    return out
