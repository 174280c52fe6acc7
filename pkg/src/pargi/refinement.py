"""Weisfeiler-Leman family refinements.

Every round computes one signature per object, then renumbers colors as the
ranks of the sorted distinct signatures.  Because each signature starts with
the object's old color, the new partition refines the old one and color ids
are a pure function of the input graph.

Signatures
    color refinement   (C(v), sorted neighbor colors)
    2-WL               (C(x, y), sorted pairs (C(x, z), C(z, y)) over z)
    k-WL               (C(t), sorted k-vectors (C(t[1<-y]), ..., C(t[k<-y])) over y)

Pairs are packed as ``a * K + b`` and k-vectors in base ``K`` (``K`` = number
of colors), which preserves the lexicographic order of the unpacked tuples.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import kernels
from .errors import BudgetExceededError
from .graph import Graph
from .parallel import check_workers, rank_rows, rank_values
from .partition import PairColoring, RefinementReport, TupleColoring, VertexPartition

__all__ = [
    "DEFAULT_MEMORY_BUDGET",
    "memory_budget",
    "initial_vertex_partition",
    "cr_round",
    "color_refine",
    "color_refine_naive",
    "initial_pair_coloring",
    "wl2_round",
    "wl2_refine",
    "walk_refine",
    "walk_rounds",
    "log_round_budget",
    "simulate_cr_by_wl2",
    "atomic_tuple_coloring",
    "wlk_round",
    "wlk_refine",
    "cr_round_history",
]

DEFAULT_MEMORY_BUDGET = 1 << 24
_PACK_LIMIT = 1 << 62


def memory_budget(budget: int | None = None) -> int:
    """Explicit budget, else ``PARGI_MEMORY_BUDGET``, else the default (in int64 cells)."""
    if budget is not None:
        return int(budget)
    env = os.environ.get("PARGI_MEMORY_BUDGET")
    return int(env) if env else DEFAULT_MEMORY_BUDGET


def _iterate(algorithm, start, step, max_rounds, cells, k=1) -> RefinementReport:
    current = start
    counts = [start.num_colors]
    rounds = 0
    # a discrete coloring cannot split further
    stabilized = start.num_colors == cells
    while not stabilized and rounds < max_rounds:
        nxt = step(current)
        rounds += 1
        counts.append(nxt.num_colors)
        stabilized = nxt.num_colors == current.num_colors or nxt.num_colors == cells
        current = nxt
    return RefinementReport(algorithm, current, rounds, stabilized, counts, k)


# --------------------------------------------------------------------------
# color refinement

def initial_vertex_partition(g: Graph) -> VertexPartition:
    ids, num = rank_values(g.initial_colors)
    return VertexPartition(ids, num)


def cr_round(g: Graph, vp: VertexPartition, workers: int = 1) -> VertexPartition:
    indptr, indices = g.csr()
    width = 1 + (int(np.diff(indptr).max()) if g.n else 0)
    colors = vp.color_of
    k = kernels.get()

    def build(a, b):
        return k.cr_rows(indptr, indices, colors, a, b, width)

    ids, num = rank_rows(build, g.n, width, workers)
    return VertexPartition(ids, num)


def color_refine(g: Graph, max_rounds: int | None = None, workers: int = 1) -> RefinementReport:
    """Color refinement (1-WL) to the stable partition or ``max_rounds`` rounds."""
    workers = check_workers(workers)
    max_rounds = g.n if max_rounds is None else int(max_rounds)
    return _iterate("cr", initial_vertex_partition(g),
                    lambda vp: cr_round(g, vp, workers), max_rounds, g.n)


def cr_round_history(g: Graph, max_rounds: int | None = None, workers: int = 1) -> list[VertexPartition]:
    """Partitions after rounds 0, 1, ... up to and including the stable one."""
    max_rounds = g.n if max_rounds is None else int(max_rounds)
    hist = [initial_vertex_partition(g)]
    while len(hist) - 1 < max_rounds and hist[-1].num_colors < g.n:
        nxt = cr_round(g, hist[-1], workers)
        if nxt.num_colors == hist[-1].num_colors:
            break
        hist.append(nxt)
    return hist


def color_refine_naive(g: Graph, max_rounds: int | None = None) -> RefinementReport:
    """Single-threaded reference: plain Python tuples, sorted, ranked."""
    n = g.n
    max_rounds = n if max_rounds is None else int(max_rounds)
    nbrs = [[] for _ in range(n)]
    for u, v in g.edge_array.tolist():
        nbrs[u].append(v)
        nbrs[v].append(u)
    init = g.initial_colors.tolist()
    palette = {c: i for i, c in enumerate(sorted(set(init)))}
    colors = [palette[c] for c in init]
    num = len(palette)
    counts = [num]
    rounds = 0
    stabilized = num == n
    while not stabilized and rounds < max_rounds:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in nbrs[v]))) for v in range(n)]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        rounds += 1
        counts.append(len(rank))
        stabilized = len(rank) == num or len(rank) == n
        colors, num = new, len(rank)
    return RefinementReport("cr-naive", VertexPartition(np.array(colors, dtype=np.int64), num),
                            rounds, stabilized, counts)


# --------------------------------------------------------------------------
# 2-WL and walk refinement

_DIAG, _NON_EDGE, _EDGE = 0, 1, 2


def initial_pair_coloring(g: Graph) -> PairColoring:
    """Atomic pair colors: diagonal carries the vertex color, then non-edge, then edge."""
    vc, nvc = rank_values(g.initial_colors)
    kind = np.where(g.adjacency(), _EDGE, _NON_EDGE).astype(np.int64)
    color = np.zeros((g.n, g.n), dtype=np.int64)
    np.fill_diagonal(kind, _DIAG)
    np.fill_diagonal(color, vc)
    ids, num = rank_values((kind * max(nvc, 1) + color).reshape(-1))
    return PairColoring(g.n, ids, num)


def wl2_round(pc: PairColoring, workers: int = 1) -> PairColoring:
    n, K = pc.n, pc.num_colors
    C = pc.color_of
    k = kernels.get()

    def build(a, b):
        return k.wl2_rows(C, K, a, b)

    ids, num = rank_rows(build, n, n + 1, workers, rows_per_unit=n)
    return PairColoring(n, ids, num)


def wl2_refine(g: Graph, rounds: int | None = None, workers: int = 1) -> RefinementReport:
    workers = check_workers(workers)
    max_rounds = g.n * g.n if rounds is None else int(rounds)
    return _iterate("wl2", initial_pair_coloring(g), lambda pc: wl2_round(pc, workers),
                    max_rounds, g.n * g.n, k=2)


def walk_rounds(walk_length: int) -> int:
    """2-WL rounds realizing walks of the given length (rounded up to a power of two)."""
    walk_length = int(walk_length)
    if walk_length < 1:
        raise ValueError(f"walk length must be >= 1, got {walk_length}")
    return (walk_length - 1).bit_length()


def walk_refine(g: Graph, walk_length: int, workers: int = 1) -> PairColoring:
    """Walk refinement by doubling: each 2-WL round concatenates two half-walks."""
    pc = initial_pair_coloring(g)
    for _ in range(walk_rounds(walk_length)):
        pc = wl2_round(pc, workers)
    return pc


def log_round_budget(n: int) -> int:
    """ceil(log2(2n)), at least 1."""
    return max(1, math.ceil(math.log2(2 * max(n, 1))))


def _diagonal_partition(pc: PairColoring) -> VertexPartition:
    ids, num = rank_values(pc.diagonal())
    return VertexPartition(ids, num)


def simulate_cr_by_wl2(g: Graph, workers: int = 1, max_rounds: int | None = None) -> RefinementReport:
    """Vertex partition read off the 2-WL diagonal after at most ceil(log2(2n)) rounds.

    Stops early once the pair coloring is stable.  ``color_counts`` tracks the
    vertex partition; ``extra["pair_color_counts"]`` the pair coloring.
    """
    workers = check_workers(workers)
    budget = log_round_budget(g.n) if max_rounds is None else int(max_rounds)
    pc = initial_pair_coloring(g)
    pair_counts = [pc.num_colors]
    vertex = [_diagonal_partition(pc)]
    rounds = 0
    stabilized = pc.num_colors == g.n * g.n
    while not stabilized and rounds < budget:
        nxt = wl2_round(pc, workers)
        rounds += 1
        pair_counts.append(nxt.num_colors)
        vertex.append(_diagonal_partition(nxt))
        stabilized = nxt.num_colors in (pc.num_colors, g.n * g.n)
        pc = nxt
    return RefinementReport("cr-via-wl2", vertex[-1], rounds, stabilized,
                            [vp.num_colors for vp in vertex], 1,
                            {"pair_color_counts": pair_counts, "round_budget": budget})


# --------------------------------------------------------------------------
# k-WL

def _tuple_digits(n: int, k: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    stop = n ** k if stop is None else stop
    t = np.arange(start, stop, dtype=np.int64)
    powers = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (t[:, None] // powers[None, :]) % n


def _check_tuple_budget(n: int, k: int, budget: int | None) -> None:
    limit = memory_budget(budget)
    size = n ** k
    if size > limit:
        raise BudgetExceededError(f"{k}-WL on n={n} ({n}^{k} tuples)", size, limit)


def atomic_tuple_coloring(g: Graph, k: int, workers: int = 1,
                          memory_budget: int | None = None) -> TupleColoring:
    """Ordered isomorphism type: (equality pattern, adjacency pattern, vertex colors)."""
    n = g.n
    _check_tuple_budget(n, k, memory_budget)
    vc, _ = rank_values(g.initial_colors)
    adj = g.adjacency()
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    width = 2 * len(pairs) + k

    def build(a, b):
        d = _tuple_digits(n, k, a, b)
        rows = np.empty((b - a, width), dtype=np.int64)
        for c, (i, j) in enumerate(pairs):
            rows[:, c] = d[:, i] == d[:, j]
            rows[:, len(pairs) + c] = adj[d[:, i], d[:, j]]
        rows[:, 2 * len(pairs):] = vc[d]
        return rows

    ids, num = rank_rows(build, n ** k, width, workers)
    return TupleColoring(n, k, ids, num)


def wlk_round(tc: TupleColoring, workers: int = 1) -> TupleColoring:
    n, k, K = tc.n, tc.k, tc.num_colors
    C = tc.color_of
    if K ** k < _PACK_LIMIT:
        uk = kernels.get()

        def build(a, b):
            return uk.wlk_rows(C, n, k, K, a, b)
    else:
        # packed k-vectors would overflow int64: rank the vectors first
        # (ranks preserve their lexicographic order), then sort those ranks
        powers = n ** np.arange(k - 1, -1, -1, dtype=np.int64)

        def vectors(a, b):
            d = _tuple_digits(n, k, a, b)
            t = np.arange(a, b, dtype=np.int64)
            y = np.arange(n, dtype=np.int64)
            sub = t[:, None, None] + (y[None, :, None] - d[:, None, :]) * powers[None, None, :]
            return C[sub].reshape(-1, k)

        vec_ids, _ = rank_rows(vectors, n ** k, k, workers, rows_per_unit=n)
        vec_ids = vec_ids.reshape(-1, n)

        def build(a, b):
            rows = np.empty((b - a, n + 1), dtype=np.int64)
            rows[:, 0] = C[a:b]
            rows[:, 1:] = np.sort(vec_ids[a:b], axis=1)
            return rows

    ids, num = rank_rows(build, n ** k, n + 1, workers)
    return TupleColoring(n, k, ids, num)


def wlk_refine(g: Graph, k: int, rounds: int | None = None, workers: int = 1,
               memory_budget: int | None = None) -> RefinementReport:
    """Direct k-dimensional WL on all n^k ordered tuples."""
    k = int(k)
    if k < 2:
        raise ValueError(f"k-WL needs k >= 2, got {k}")
    workers = check_workers(workers)
    start = atomic_tuple_coloring(g, k, workers, memory_budget)
    cells = g.n ** k
    max_rounds = cells if rounds is None else int(rounds)
    return _iterate("kwl", start, lambda tc: wlk_round(tc, workers), max_rounds, cells, k=k)
