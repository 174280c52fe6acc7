"""Compiled kernels.  Every function is ``nogil`` so thread-pool workers run them concurrently."""

from __future__ import annotations

import numpy as np
from numba import njit

_jit = njit(cache=True, nogil=True)


@_jit
def _row_less(rows, a, b):
    for c in range(rows.shape[1]):
        x = rows[a, c]
        y = rows[b, c]
        if x != y:
            return x < y
    return False


@_jit
def _row_equal(rows, a, b):
    for c in range(rows.shape[1]):
        if rows[a, c] != rows[b, c]:
            return False
    return True


@_jit
def lex_argsort(rows):
    # bottom-up stable merge sort of row indices
    m = rows.shape[0]
    src = np.arange(m)
    dst = np.empty(m, dtype=np.int64)
    width = 1
    while width < m:
        lo = 0
        while lo < m:
            mid = min(lo + width, m)
            hi = min(lo + 2 * width, m)
            i, j, o = lo, mid, lo
            while i < mid and j < hi:
                if _row_less(rows, src[j], src[i]):
                    dst[o] = src[j]
                    j += 1
                else:
                    dst[o] = src[i]
                    i += 1
                o += 1
            while i < mid:
                dst[o] = src[i]
                i += 1
                o += 1
            while j < hi:
                dst[o] = src[j]
                j += 1
                o += 1
            lo += 2 * width
        src, dst = dst, src
        width *= 2
    return src


@_jit
def unique_rows(rows):
    m = rows.shape[0]
    inverse = np.empty(m, dtype=np.int64)
    if m == 0:
        return rows[:0].copy(), inverse
    order = lex_argsort(rows)
    firsts = np.empty(m, dtype=np.int64)
    count = 0
    for r in range(m):
        cur = order[r]
        if r == 0 or not _row_equal(rows, order[r - 1], cur):
            firsts[count] = cur
            count += 1
        inverse[cur] = count - 1
    out = np.empty((count, rows.shape[1]), dtype=rows.dtype)
    for i in range(count):
        out[i, :] = rows[firsts[i], :]
    return out, inverse


@_jit
def cr_rows(indptr, indices, colors, start, stop, width):
    out = np.full((stop - start, width), -1, dtype=np.int64)
    for v in range(start, stop):
        r = v - start
        out[r, 0] = colors[v]
        lo = indptr[v]
        d = indptr[v + 1] - lo
        buf = np.empty(d, dtype=np.int64)
        for t in range(d):
            buf[t] = colors[indices[lo + t]]
        buf.sort()
        for t in range(d):
            out[r, 1 + t] = buf[t]
    return out


@_jit
def wl2_rows(C, K, start, stop):
    n = C.shape[0]
    out = np.empty(((stop - start) * n, n + 1), dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    for x in range(start, stop):
        for y in range(n):
            r = (x - start) * n + y
            out[r, 0] = C[x, y]
            for z in range(n):
                buf[z] = C[x, z] * K + C[z, y]
            buf.sort()
            for z in range(n):
                out[r, 1 + z] = buf[z]
    return out


@_jit
def wlk_rows(C, n, k, K, start, stop):
    out = np.empty((stop - start, n + 1), dtype=np.int64)
    digits = np.empty(k, dtype=np.int64)
    powers = np.empty(k, dtype=np.int64)
    p = 1
    for i in range(k - 1, -1, -1):
        powers[i] = p
        p *= n
    buf = np.empty(n, dtype=np.int64)
    for t in range(start, stop):
        rem = t
        for i in range(k - 1, -1, -1):
            digits[i] = rem % n
            rem //= n
        for y in range(n):
            code = 0
            for i in range(k):
                code = code * K + C[t + (y - digits[i]) * powers[i]]
            buf[y] = code
        buf.sort()
        out[t - start, 0] = C[t]
        for y in range(n):
            out[t - start, 1 + y] = buf[y]
    return out
