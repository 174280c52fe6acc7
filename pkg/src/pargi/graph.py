"""Simple undirected vertex-colored graphs, their text formats and generators.

Vertices are the integers ``0..n-1``.  A :class:`Graph` is immutable once
built, so instances can be handed to concurrent workers without locking.

``make_random`` draws from SplitMix64 (Steele, Lea & Flood; public domain
reference code by S. Vigna).  The k-th draw (k = 0, 1, ...) for a seed ``s`` is
``mix(s + (k + 1) * 0x9E3779B97F4A7C15 mod 2**64)``; pair ``(i, j)`` with
``i < j`` consumes draw number equal to its rank in row-major upper-triangle
order and becomes an edge iff ``(draw >> 11) * 2**-53 < p``.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .errors import (
    DuplicateEdgeError,
    Graph6Error,
    HeaderError,
    ParseError,
    SelfLoopError,
    UnknownColorVertexError,
    VertexRangeError,
)

__all__ = [
    "Graph",
    "parse_graph6",
    "to_graph6",
    "parse_edgelist",
    "to_edgelist",
    "read_graph",
    "read_graphs",
    "make_path",
    "make_cycle",
    "make_complete",
    "make_random",
    "disjoint_union",
    "hard_pair",
    "HARD_PAIRS",
    "splitmix64",
]


class Graph:
    """Undirected simple graph with non-negative integer vertex colors.

    ``edge_array`` holds every edge once as a row ``(u, v)`` with ``u < v``,
    rows sorted lexicographically.  Colors are stored as given; refinement
    routines rank them before use, so only their relative order matters.
    """

    __slots__ = ("n", "edge_array", "initial_colors", "_csr", "_adj", "_edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] | np.ndarray = (),
                 initial_colors: Iterable[int] | np.ndarray | None = None):
        n = int(n)
        if n < 0:
            raise VertexRangeError(f"vertex count must be non-negative, got {n}")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if (arr < 0).any() or (arr >= n).any():
                bad = arr[((arr < 0) | (arr >= n)).any(axis=1)][0]
                raise VertexRangeError(f"edge {tuple(bad.tolist())} has endpoint outside 0..{n - 1}")
            loops = arr[:, 0] == arr[:, 1]
            if loops.any():
                raise SelfLoopError(f"self-loop at vertex {int(arr[loops][0, 0])}")
            arr = np.sort(arr, axis=1)
            order = np.lexsort((arr[:, 1], arr[:, 0]))
            arr = arr[order]
            dup = (np.diff(arr, axis=0) == 0).all(axis=1)
            if dup.any():
                u, v = arr[1:][dup][0].tolist()
                raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)

        if initial_colors is None:
            colors = np.zeros(n, dtype=np.int64)
        else:
            colors = np.array(initial_colors, dtype=np.int64).reshape(-1)
            if colors.shape[0] != n:
                raise VertexRangeError(f"expected {n} colors, got {colors.shape[0]}")
            if (colors < 0).any():
                raise ParseError("vertex colors must be non-negative")
        colors.setflags(write=False)

        self.n = n
        self.edge_array = arr
        self.initial_colors = colors
        self._csr = None
        self._adj = None
        self._edges = None

    @classmethod
    def _trusted(cls, n: int, edge_array: np.ndarray, colors: np.ndarray,
                 csr=None, adj=None) -> Graph:
        # Skips validation; callers guarantee canonical, read-only arrays.
        g = cls.__new__(cls)
        g.n = n
        g.edge_array = edge_array
        g.initial_colors = colors
        g._csr = csr
        g._adj = adj
        g._edges = None
        return g

    def with_colors(self, colors) -> Graph:
        """Same edges, new vertex colors; shares cached adjacency structures."""
        c = np.array(colors, dtype=np.int64).reshape(-1)
        if c.shape[0] != self.n:
            raise VertexRangeError(f"expected {self.n} colors, got {c.shape[0]}")
        c.setflags(write=False)
        return Graph._trusted(self.n, self.edge_array, c, self._csr, self._adj)

    def relabel(self, perm) -> Graph:
        """Return pi(G): vertex ``v`` becomes ``perm[v]``."""
        p = np.asarray(perm, dtype=np.int64)
        if p.shape != (self.n,) or not np.array_equal(np.sort(p), np.arange(self.n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        colors = np.empty(self.n, dtype=np.int64)
        colors[p] = self.initial_colors
        return Graph(self.n, p[self.edge_array], colors)

    @property
    def m(self) -> int:
        return int(self.edge_array.shape[0])

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        if self._edges is None:
            self._edges = frozenset(map(tuple, self.edge_array.tolist()))
        return self._edges

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric adjacency in CSR form: ``(indptr, indices)``."""
        if self._csr is None:
            src = np.concatenate([self.edge_array[:, 0], self.edge_array[:, 1]])
            dst = np.concatenate([self.edge_array[:, 1], self.edge_array[:, 0]])
            order = np.lexsort((dst, src))
            indices = np.ascontiguousarray(dst[order])
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
            indptr.setflags(write=False)
            indices.setflags(write=False)
            self._csr = (indptr, indices)
        return self._csr

    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix (cached)."""
        if self._adj is None:
            a = np.zeros((self.n, self.n), dtype=bool)
            if self.m:
                a[self.edge_array[:, 0], self.edge_array[:, 1]] = True
                a[self.edge_array[:, 1], self.edge_array[:, 0]] = True
            a.setflags(write=False)
            self._adj = a
        return self._adj

    def degrees(self) -> np.ndarray:
        indptr, _ = self.csr()
        return np.diff(indptr)

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.csr()
        return indices[indptr[v]:indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency()[u, v])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.edge_array, other.edge_array)
                and np.array_equal(self.initial_colors, other.initial_colors))

    def __hash__(self) -> int:
        return hash((self.n, self.edge_array.tobytes(), self.initial_colors.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# --------------------------------------------------------------------------
# graph6

def _g6_size_prefix(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126, 63 + (n >> 12 & 63), 63 + (n >> 6 & 63), 63 + (n & 63)])
    if n <= 68719476735:
        return bytes([126, 126] + [63 + (n >> s & 63) for s in (30, 24, 18, 12, 6, 0)])
    raise ValueError(f"n={n} too large for graph6")


def to_graph6(g: Graph) -> bytes:
    """Encode ``g`` as one graph6 line (no trailing newline).  Colors are dropped."""
    n = g.n
    nbits = n * (n - 1) // 2
    bits = np.zeros(nbits + (-nbits) % 6, dtype=np.uint8)
    if g.m:
        u, v = g.edge_array[:, 0], g.edge_array[:, 1]
        # column-wise upper triangle: bit index of (u, v), u < v, is v(v-1)/2 + u
        bits[v * (v - 1) // 2 + u] = 1
    groups = bits.reshape(-1, 6) @ np.array([32, 16, 8, 4, 2, 1], dtype=np.int64)
    return _g6_size_prefix(n) + bytes((groups + 63).astype(np.uint8).tolist())


def parse_graph6(data: bytes | str) -> Graph:
    """Decode one graph6 line.  A ``>>graph6<<`` header and trailing newline are accepted."""
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.rstrip(b"\r\n")
    base = 0
    if data.startswith(b">>graph6<<"):
        base = 10
        data = data[10:]
    if not data:
        raise Graph6Error("empty graph6 string", base)
    for off, byte in enumerate(data):
        if not 63 <= byte <= 126:
            raise Graph6Error(f"byte {byte!r} outside the graph6 range 63..126", base + off)

    if data[0] != 126:
        n, pos = data[0] - 63, 1
    elif len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise Graph6Error("truncated 8-byte size field", base + len(data))
        n = 0
        for b in data[2:8]:
            n = (n << 6) | (b - 63)
        pos = 8
        if n <= 258047:
            raise Graph6Error(f"non-minimal size encoding for n={n}", base)
    else:
        if len(data) < 4:
            raise Graph6Error("truncated 4-byte size field", base + len(data))
        n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
        pos = 4
        if n < 63:
            raise Graph6Error(f"non-minimal size encoding for n={n}", base)
        if data[1] == 126:
            raise Graph6Error("size byte 126 inside 4-byte size field", base + 1)

    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    body = data[pos:]
    if len(body) != need:
        raise Graph6Error(f"expected {need} adjacency bytes for n={n}, got {len(body)}",
                          base + pos + min(len(body), need))
    vals = np.frombuffer(body, dtype=np.uint8).astype(np.int64) - 63
    bits = ((vals[:, None] >> np.arange(5, -1, -1)) & 1).reshape(-1)
    if bits[nbits:].any():
        raise Graph6Error("nonzero padding bits", base + len(data) - 1)
    idx = np.flatnonzero(bits[:nbits])
    # invert idx = v(v-1)/2 + u
    v = ((1 + np.sqrt(1 + 8 * idx)) // 2).astype(np.int64)
    v -= (v * (v - 1) // 2 > idx)
    v += ((v + 1) * v // 2 <= idx)
    u = idx - v * (v - 1) // 2
    return Graph(n, np.stack([u, v], axis=1))


# --------------------------------------------------------------------------
# edge-list text format

def parse_edgelist(text: str) -> Graph:
    """Parse the ``p``/``e``/``c`` line format; ``#`` lines and blanks are skipped."""
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    colors: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag, args = parts[0], parts[1:]
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer field in {line!r}") from None
        if n is None:
            if tag != "p" or len(nums) != 2:
                raise HeaderError(f"line {lineno}: expected 'p <n> <m>' header first")
            n, m = nums
            if n < 0 or m < 0:
                raise HeaderError(f"line {lineno}: negative count in header")
            continue
        if tag == "p":
            raise HeaderError(f"line {lineno}: repeated header")
        if tag == "e":
            if len(nums) != 2:
                raise ParseError(f"line {lineno}: edge line needs two vertices")
            u, v = nums
            if not (0 <= u < n and 0 <= v < n):
                raise VertexRangeError(f"line {lineno}: vertex index out of range 0..{n - 1}")
            if u == v:
                raise SelfLoopError(f"line {lineno}: self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdgeError(f"line {lineno}: duplicate edge {key}")
            seen.add(key)
            edges.append(key)
        elif tag == "c":
            if len(nums) != 2:
                raise ParseError(f"line {lineno}: color line needs vertex and color")
            v, c = nums
            if not 0 <= v < n:
                raise UnknownColorVertexError(f"line {lineno}: color for unknown vertex {v}")
            if c < 0:
                raise ParseError(f"line {lineno}: negative color")
            colors[v] = c
        else:
            raise ParseError(f"line {lineno}: unknown line tag {tag!r}")
    if n is None:
        raise HeaderError("missing 'p <n> <m>' header")
    if len(edges) != m:
        raise HeaderError(f"header declares {m} edges, found {len(edges)}")
    col = np.zeros(n, dtype=np.int64)
    for v, c in colors.items():
        col[v] = c
    return Graph(n, edges, col)


def to_edgelist(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines.extend(f"e {u} {v}" for u, v in g.edge_array.tolist())
    lines.extend(f"c {v} {c}" for v, c in enumerate(g.initial_colors.tolist()) if c)
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    """Load a graph file, sniffing graph6 vs. edge-list by content."""
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("ascii", errors="replace")
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("p ") or s == "p":
            return parse_edgelist(text)
        return parse_graph6(s.encode("ascii", errors="replace"))
    raise ParseError(f"{path}: no graph found")


def read_graphs(path) -> list[Graph]:
    """All graphs in a file: one per graph6 line, or a single edge-list graph."""
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = [ln.strip() for ln in raw.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith(b"#")]
    if not lines:
        return []
    if lines[0] == b"p" or lines[0].startswith(b"p "):
        return [parse_edgelist(raw.decode("ascii", errors="replace"))]
    return [parse_graph6(ln) for ln in lines]


# --------------------------------------------------------------------------
# generators

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First ``count`` SplitMix64 outputs for ``seed`` as a uint64 array."""
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + k * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def _check_n(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return n


def make_path(n: int) -> Graph:
    n = _check_n(n)
    a = np.arange(n - 1)
    return Graph(n, np.stack([a, a + 1], axis=1))


def make_cycle(n: int) -> Graph:
    n = _check_n(n)
    if n < 3:
        return make_path(n)
    a = np.arange(n)
    return Graph(n, np.stack([a, (a + 1) % n], axis=1))


def make_complete(n: int) -> Graph:
    n = _check_n(n)
    iu = np.triu_indices(n, 1)
    return Graph(n, np.stack(iu, axis=1))


def make_random(n: int, edge_probability: float, seed: int) -> Graph:
    """G(n, p) with SplitMix64 draws; identical arguments give identical graphs."""
    n = _check_n(n)
    p = float(edge_probability)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge_probability must be in [0, 1], got {p}")
    iu = np.triu_indices(n, 1)
    draws = splitmix64(int(seed), iu[0].shape[0])
    u = (draws >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    keep = u < p
    return Graph(n, np.stack([iu[0][keep], iu[1][keep]], axis=1))


def disjoint_union(*graphs: Graph) -> Graph:
    edges, colors, off = [], [], 0
    for g in graphs:
        edges.append(g.edge_array + off)
        colors.append(g.initial_colors)
        off += g.n
    return Graph(off, np.concatenate(edges) if edges else (),
                 np.concatenate(colors) if colors else None)


def _cayley_z4z4(connection: list[tuple[int, int]]) -> Graph:
    edges = set()
    for a in range(4):
        for b in range(4):
            for da, db in connection:
                u, v = 4 * a + b, 4 * ((a + da) % 4) + (b + db) % 4
                edges.add((min(u, v), max(u, v)))
    return Graph(16, sorted(edges))


def _rook4() -> Graph:
    return _cayley_z4z4([(d, 0) for d in (1, 2, 3)] + [(0, d) for d in (1, 2, 3)])


def _shrikhande() -> Graph:
    return _cayley_z4z4([(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)])


def _prism3() -> Graph:
    return Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)])


def _k33() -> Graph:
    return Graph(6, [(a, b) for a in range(3) for b in range(3, 6)])


HARD_PAIRS = {
    "c6-vs-2c3": lambda: (make_cycle(6), disjoint_union(make_cycle(3), make_cycle(3))),
    "c8-vs-2c4": lambda: (make_cycle(8), disjoint_union(make_cycle(4), make_cycle(4))),
    "k33-vs-prism": lambda: (_k33(), _prism3()),
    "rook4-vs-shrikhande": lambda: (_rook4(), _shrikhande()),
}


def hard_pair(name: str) -> tuple[Graph, Graph]:
    """Two non-isomorphic regular graphs that color refinement cannot tell apart."""
    try:
        return HARD_PAIRS[name]()
    except KeyError:
        raise KeyError(f"unknown hard pair {name!r}; known: {sorted(HARD_PAIRS)}") from None
