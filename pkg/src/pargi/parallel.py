"""Bulk-synchronous round engine.

A round splits the index range into writer-disjoint chunks, builds each
chunk's signature rows and local unique set on a worker thread, then (after
the barrier implied by collecting every future) ranks the union of local
unique sets.  The final ids depend only on the signatures, never on how the
range was chunked or how many workers ran.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels

# upper bound on int64 cells materialized per chunk (~8 MiB)
CHUNK_CELLS = 1 << 20

_pools: dict[tuple[str, int], ThreadPoolExecutor] = {}
_pools_lock = threading.Lock()


def get_pool(workers: int, tag: str = "round") -> ThreadPoolExecutor:
    """Shared executor per (tag, size).  Distinct tags keep nested fan-outs from
    waiting on their own pool."""
    with _pools_lock:
        pool = _pools.get((tag, workers))
        if pool is None:
            pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix=f"pargi-{tag}-{workers}")
            _pools[(tag, workers)] = pool
        return pool


def check_workers(workers: int) -> int:
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    return workers


def split_ranges(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total)) if total else 1
    bounds = np.linspace(0, total, parts + 1).round().astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    """Order-preserving map; runs inline for a single worker."""
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    return list(get_pool(workers).map(fn, items))


def rank_rows(build: Callable[[int, int], np.ndarray], total: int, width: int,
              workers: int = 1, rows_per_unit: int = 1) -> tuple[np.ndarray, int]:
    """Canonical ids for signature rows produced chunk-wise by ``build``.

    The index space is ``total`` units of ``rows_per_unit`` rows each;
    ``build(start, stop)`` returns the rows of units ``start..stop-1`` in order.
    Returns ``(ids, num_colors)`` where ids are ranks of the lexicographically
    sorted distinct rows.
    """
    workers = check_workers(workers)
    if total * rows_per_unit == 0:
        return np.empty(0, dtype=np.int64), 0
    per_chunk = max(1, CHUNK_CELLS // max(1, width * rows_per_unit))
    parts = max(workers, math.ceil(total / per_chunk))
    ranges = split_ranges(total, parts)
    k = kernels.get()

    def local(r):
        rows = build(*r)
        return k.unique_rows(rows)

    results = parallel_map(local, ranges, workers)
    if len(results) == 1:
        uniq, inv = results[0]
        return inv, int(uniq.shape[0])
    stacked = np.concatenate([u for u, _ in results])
    glob_uniq, glob_inv = k.unique_rows(stacked)
    ids = np.empty(total * rows_per_unit, dtype=np.int64)
    off = 0
    for (a, b), (u, inv) in zip(ranges, results):
        ids[a * rows_per_unit:b * rows_per_unit] = glob_inv[off + inv]
        off += u.shape[0]
    return ids, int(glob_uniq.shape[0])


def rank_values(values: np.ndarray) -> tuple[np.ndarray, int]:
    """Ranks of the sorted distinct entries of a 1-D integer array."""
    uniq, inv = np.unique(np.asarray(values, dtype=np.int64), return_inverse=True)
    return inv.reshape(-1).astype(np.int64, copy=False), int(uniq.shape[0])
