"""Colorings of vertices, ordered pairs and ordered k-tuples, plus refinement reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexSpaceError

SCHEMA_VERSION = 1


def _frozen(a) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


class _Coloring:
    color_of: np.ndarray
    num_colors: int

    @property
    def flat(self) -> np.ndarray:
        return self.color_of.reshape(-1)

    def histogram(self) -> np.ndarray:
        """Class size per color id."""
        return np.bincount(self.flat, minlength=self.num_colors)

    def class_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(self.histogram().tolist()))

    def classes(self) -> list[list[int]]:
        """Member indices of each class, by color id (flat indices for pairs and tuples)."""
        order = np.argsort(self.flat, kind="stable")
        cuts = np.cumsum(self.histogram())[:-1]
        return [c.tolist() for c in np.split(order, cuts)]

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.num_colors == other.num_colors and np.array_equal(self.color_of, other.color_of)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class VertexPartition(_Coloring):
    color_of: np.ndarray
    num_colors: int

    def __post_init__(self):
        object.__setattr__(self, "color_of", _frozen(self.color_of).reshape(-1))

    @property
    def n(self) -> int:
        return int(self.color_of.shape[0])

    def is_discrete(self) -> bool:
        return self.num_colors == self.n


@dataclass(frozen=True, eq=False)
class PairColoring(_Coloring):
    n: int
    color_of: np.ndarray
    num_colors: int

    def __post_init__(self):
        object.__setattr__(self, "color_of", _frozen(self.color_of).reshape(self.n, self.n))

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.color_of)


@dataclass(frozen=True, eq=False)
class TupleColoring(_Coloring):
    n: int
    k: int
    color_of: np.ndarray
    num_colors: int

    def __post_init__(self):
        object.__setattr__(self, "color_of", _frozen(self.color_of).reshape(-1))

    def index(self, tup) -> int:
        idx = 0
        for v in tup:
            idx = idx * self.n + int(v)
        return idx

    def tuple_of(self, idx: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            idx, r = divmod(idx, self.n)
            out.append(r)
        return tuple(reversed(out))

    def diagonal(self) -> np.ndarray:
        """Colors of the constant tuples ``(v, ..., v)``."""
        step = sum(self.n ** i for i in range(self.k))
        return self.color_of[np.arange(self.n) * step]


@dataclass
class RefinementReport:
    algorithm: str
    partition: VertexPartition | PairColoring | TupleColoring
    rounds: int
    stabilized: bool
    color_counts: list[int]
    k: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.partition.n)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "algorithm": self.algorithm,
            "n": self.n,
            "k": self.k,
            "rounds": self.rounds,
            "stabilized": self.stabilized,
            "num_colors": int(self.partition.num_colors),
            "color_counts": [int(c) for c in self.color_counts],
            "partition": self.partition.flat.tolist(),
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _flat(p) -> np.ndarray:
    if isinstance(p, _Coloring):
        return p.flat
    return np.asarray(p, dtype=np.int64).reshape(-1)


def _class_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # distinct (a, b) id pairs
    if a.shape != b.shape:
        raise IndexSpaceError(f"index spaces differ: {a.shape[0]} vs {b.shape[0]}")
    if a.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(np.stack([a, b], axis=1), axis=0)


def partition_refines(a, b) -> bool:
    """True iff every class of ``a`` lies inside a single class of ``b``."""
    fa, fb = _flat(a), _flat(b)
    pairs = _class_map(fa, fb)
    return len(np.unique(pairs[:, 0])) == pairs.shape[0]


def partitions_equal(a, b) -> bool:
    """Same classes, ignoring the names of the colors."""
    return partition_refines(a, b) and partition_refines(b, a)


def distinguishes(p, x: int, y: int) -> bool:
    f = _flat(p)
    return bool(f[x] != f[y])
