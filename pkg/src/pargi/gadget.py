"""Auxiliary graph on which plain color refinement reproduces k-WL on the base graph.

Layout of G' for a base graph on n vertices and dimension k (N = n**k):

* vertices ``0..N-1``: the base layer, one per ordered k-tuple, row-major;
* for base vertex ``t`` a block of ``n + n*k`` out-layer vertices starting at
  ``N + t*(n + n*k)``: first ``u_0..u_{n-1}``, then ``v_{i,j}`` at offset
  ``n + i*k + j``.

Edges: ``t - u_i``; ``u_i - v_{i,j}``; ``v_{i,j} - base(t with position j set to i)``.
Colors: base vertices take the atomic tuple color (ids ``0..A-1``), every u
vertex gets ``A`` and every ``v_{.,j}`` gets ``A + 1 + j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, IndexSpaceError
from .graph import Graph
from .parallel import rank_values
from .partition import RefinementReport, TupleColoring, VertexPartition
from .refinement import (
    atomic_tuple_coloring,
    color_refine,
    color_refine_naive,
    memory_budget,
    simulate_cr_by_wl2,
)

BASE, OUT_U, OUT_V = 0, 1, 2
LAYER_NAMES = {BASE: "base", OUT_U: "u", OUT_V: "v"}
ENGINES = ("parallel", "naive", "wl2")


@dataclass(frozen=True, eq=False)
class GadgetGraph:
    graph: Graph
    n: int
    k: int
    layer_of: np.ndarray       # BASE / OUT_U / OUT_V per G' vertex
    aux_i: np.ndarray          # substituted vertex i for u/v vertices, -1 on base
    aux_j: np.ndarray          # tuple position j for v vertices, -1 elsewhere
    source_tuple: np.ndarray   # base vertex an aux vertex comes out from; itself on base
    num_base_colors: int

    @property
    def num_base(self) -> int:
        return self.n ** self.k

    @property
    def block(self) -> int:
        return self.n + self.n * self.k

    def base_vertex(self, tup) -> int:
        idx = 0
        for v in tup:
            idx = idx * self.n + int(v)
        return idx

    def base_tuple(self, x: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            x, r = divmod(x, self.n)
            out.append(r)
        return tuple(reversed(out))

    def u_vertex(self, t: int, i: int) -> int:
        return self.num_base + t * self.block + i

    def v_vertex(self, t: int, i: int, j: int) -> int:
        return self.num_base + t * self.block + self.n + i * self.k + j

    def mapping_dict(self) -> dict:
        """Sidecar description of the layout, for external inspection."""
        return {
            "schema_version": 1,
            "n": self.n,
            "k": self.k,
            "num_vertices": self.graph.n,
            "num_base": self.num_base,
            "color_bands": {
                "base": [0, self.num_base_colors],
                "u": self.num_base_colors,
                "v": [self.num_base_colors + 1 + j for j in range(self.k)],
            },
            "base_index": [list(self.base_tuple(x)) for x in range(self.num_base)],
            "layer": [LAYER_NAMES[int(c)] for c in self.layer_of],
            "aux_i": self.aux_i.tolist(),
            "aux_j": self.aux_j.tolist(),
            "source_tuple": self.source_tuple.tolist(),
        }

    def mapping_json(self) -> str:
        return json.dumps(self.mapping_dict(), sort_keys=True, separators=(",", ":"))


def gadget_size(n: int, k: int) -> int:
    return n ** k * (1 + n + n * k)


def build_gadget(g: Graph, k: int, memory_budget_cells: int | None = None,
                 workers: int = 1) -> GadgetGraph:
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = g.n
    size = gadget_size(n, k)
    limit = memory_budget(memory_budget_cells)
    if size > limit:
        raise BudgetExceededError(f"gadget for n={n}, k={k}", size, limit)

    N = n ** k
    block = n + n * k
    base_colors = atomic_tuple_coloring(g, k, workers, limit) if k >= 2 else None
    if base_colors is None:
        ids, A = rank_values(g.initial_colors)
    else:
        ids, A = base_colors.color_of, base_colors.num_colors

    t = np.arange(N, dtype=np.int64)
    i = np.arange(n, dtype=np.int64)
    j = np.arange(k, dtype=np.int64)
    u = N + t[:, None] * block + i[None, :]
    v = (N + t[:, None, None] * block + n + i[None, :, None] * k + j[None, None, :])
    powers = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    digits = (t[:, None] // powers[None, :]) % n
    sub = t[:, None, None] + (i[None, :, None] - digits[:, None, :]) * powers[None, None, :]

    e_base_u = np.stack([np.repeat(t, n), u.reshape(-1)], axis=1)
    e_u_v = np.stack([np.repeat(u.reshape(-1), k), v.reshape(-1)], axis=1)
    e_v_base = np.stack([v.reshape(-1), sub.reshape(-1)], axis=1)
    edges = np.concatenate([e_base_u, e_u_v, e_v_base])

    colors = np.empty(size, dtype=np.int64)
    layer = np.empty(size, dtype=np.int8)
    aux_i = np.full(size, -1, dtype=np.int64)
    aux_j = np.full(size, -1, dtype=np.int64)
    source = np.empty(size, dtype=np.int64)

    colors[:N] = ids
    layer[:N] = BASE
    source[:N] = t
    u_flat, v_flat = u.reshape(-1), v.reshape(-1)
    colors[u_flat] = A
    layer[u_flat] = OUT_U
    aux_i[u_flat] = np.tile(i, N)
    source[u_flat] = np.repeat(t, n)
    colors[v_flat] = A + 1 + np.tile(j, N * n)
    layer[v_flat] = OUT_V
    aux_i[v_flat] = np.tile(np.repeat(i, k), N)
    aux_j[v_flat] = np.tile(j, N * n)
    source[v_flat] = np.repeat(t, n * k)
    for a in (layer, aux_i, aux_j, source):
        a.setflags(write=False)
    return GadgetGraph(Graph(size, edges, colors), n, k, layer, aux_i, aux_j, source, int(A))


def induced_tuple_partition(gg: GadgetGraph, vp: VertexPartition) -> TupleColoring:
    """Restrict a partition of G' to the base layer and renumber canonically."""
    colors = vp.color_of if isinstance(vp, VertexPartition) else np.asarray(vp)
    if colors.shape[0] != gg.graph.n:
        raise IndexSpaceError(f"partition covers {colors.shape[0]} vertices, gadget has {gg.graph.n}")
    ids, num = rank_values(colors[:gg.num_base])
    return TupleColoring(gg.n, gg.k, ids, num)


def simulate_kwl_via_cr(g: Graph, k: int, engine: str = "parallel", workers: int = 1,
                        memory_budget_cells: int | None = None
                        ) -> tuple[TupleColoring, RefinementReport]:
    """k-WL tuple partition of ``g`` obtained by refining G' with the chosen CR engine."""
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    gg = build_gadget(g, k, memory_budget_cells, workers)
    if engine == "parallel":
        report = color_refine(gg.graph, workers=workers)
    elif engine == "naive":
        report = color_refine_naive(gg.graph)
    else:
        report = simulate_cr_by_wl2(gg.graph, workers=workers)
    tc = induced_tuple_partition(gg, report.partition)
    return tc, report
