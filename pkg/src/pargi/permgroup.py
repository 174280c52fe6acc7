"""Permutation groups given by generators.

Permutations are tuples of images: ``p[i]`` is the image of point ``i``.
Products read left to right: ``compose(a, b)`` applies ``a`` first, so it
maps ``i`` to ``b[a[i]]``.

A :class:`StabilizerChain` stores, for each level ``i``, non-identity coset
representatives of ``G_{i+1}`` in ``G_i`` keyed by the image of point ``i``
(the base is the natural order ``0, 1, ..., n-2``).
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import NotTransitiveError, ParseError
from .parallel import check_workers, parallel_map

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def check_perm(p, n: int | None = None) -> Perm:
    try:
        p = tuple(int(x) for x in p)
    except (TypeError, ValueError):
        raise ParseError(f"not a permutation: {p!r}") from None
    if sorted(p) != list(range(len(p))):
        raise ParseError(f"not a permutation of 0..{len(p) - 1}: {list(p)}")
    if n is not None and len(p) != n:
        raise ParseError(f"permutation has degree {len(p)}, expected {n}")
    return p


def compose(a: Perm, b: Perm) -> Perm:
    """``a`` then ``b``."""
    if len(a) != len(b):
        raise ValueError(f"degree mismatch: {len(a)} vs {len(b)}")
    return tuple(b[i] for i in a)


def inverse(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return tuple(inv)


def to_cycles(p: Perm) -> str:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [i], p[i]
        seen.add(i)
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def from_cycles(text: str, n: int) -> Perm:
    """Parse cycle notation such as ``(0 1 2)(3 4)``; cycles compose left to right."""
    p = identity(n)
    body = text.replace(",", " ")
    if re.sub(r"\(\s*[\d\s]*\)", "", body).strip():
        raise ParseError(f"bad cycle notation {text!r}")
    for grp in re.findall(r"\(([\d\s]*)\)", body):
        pts = [int(x) for x in grp.split()]
        if len(set(pts)) != len(pts) or any(x >= n for x in pts):
            raise ParseError(f"bad cycle ({grp}) for degree {n}")
        c = list(range(n))
        for a, b in zip(pts, pts[1:] + pts[:1]):
            c[a] = b
        p = compose(p, tuple(c))
    return p


@dataclass(frozen=True)
class GeneratingSet:
    n: int
    gens: tuple[Perm, ...] = ()

    def __post_init__(self):
        gens = tuple(check_perm(g, self.n) for g in self.gens)
        object.__setattr__(self, "gens", tuple(g for g in gens if not is_identity(g)))

    def __len__(self) -> int:
        return len(self.gens)

    def conjugate(self, pi: Perm) -> GeneratingSet:
        """Generators of pi^-1 G pi (relabel every point x as pi[x])."""
        pinv = inverse(pi)
        return GeneratingSet(self.n, tuple(compose(compose(pinv, g), pi) for g in self.gens))


class SiftResult(NamedTuple):
    member: bool
    drop_level: int
    residue: Perm


@dataclass(frozen=True)
class StabilizerChain:
    n: int
    levels: tuple[tuple[Perm, ...], ...]
    _index: tuple[dict, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = tuple({rep[i]: (rep, inverse(rep)) for rep in reps}
                    for i, reps in enumerate(self.levels))
        object.__setattr__(self, "_index", idx)

    @classmethod
    def empty(cls, n: int) -> StabilizerChain:
        return cls(n, tuple(() for _ in range(max(n - 1, 0))))

    def representatives(self):
        for reps in self.levels:
            yield from reps

    def size(self) -> int:
        return sum(len(r) for r in self.levels)

    def check(self) -> None:
        """Raise AssertionError unless every level invariant holds."""
        assert len(self.levels) == max(self.n - 1, 0)
        for i, reps in enumerate(self.levels):
            images = [r[i] for r in reps]
            assert len(set(images)) == len(images), f"level {i}: repeated image"
            assert len(reps) <= self.n - i - 1
            for r in reps:
                assert all(r[j] == j for j in range(i)), f"level {i}: prefix not fixed"
                assert r[i] != i


def sift(x: Perm, chain: StabilizerChain) -> SiftResult:
    """Strip ``x`` level by level through the chain's coset representatives."""
    if len(x) != chain.n:
        raise ValueError(f"degree mismatch: {len(x)} vs {chain.n}")
    r = x
    for i, table in enumerate(chain._index):
        img = r[i]
        if img == i:
            continue
        hit = table.get(img)
        if hit is None:
            return SiftResult(False, i, r)
        r = compose(r, hit[1])
    return SiftResult(True, -1, identity(chain.n))


def contains(chain: StabilizerChain, x: Perm) -> bool:
    return sift(tuple(x), chain).member


def group_order(chain: StabilizerChain) -> int:
    order = 1
    for reps in chain.levels:
        order *= len(reps) + 1
    return order


def _close(chain: StabilizerChain, pending: list[Perm]) -> StabilizerChain:
    # Sims/FHL table closure: sift until every product of two table entries sifts.
    levels = [list(reps) for reps in chain.levels]
    work = StabilizerChain(chain.n, chain.levels)
    stack = list(reversed(pending))
    while stack:
        res = sift(stack.pop(), work)
        if res.member:
            continue
        r = res.residue
        levels[res.drop_level].append(r)
        work = StabilizerChain(chain.n, tuple(tuple(lv) for lv in levels))
        for t in list(work.representatives()):
            stack.append(compose(t, r))
            stack.append(compose(r, t))
    return work


def schreier_sims(gs: GeneratingSet) -> StabilizerChain:
    """Complete chain for <gs>; sifting against it is an exact membership test."""
    return _close(StabilizerChain.empty(gs.n), list(gs.gens))


def refine_generating_set(gs: GeneratingSet, seed: int | None = None, workers: int = 1
                          ) -> tuple[GeneratingSet, StabilizerChain]:
    """Shrink a (possibly huge) generating set to one of size at most log2|G|.

    Each round sifts every input element against a snapshot of the chain in
    parallel.  One failing element is chosen (lowest index, or uniformly at
    random when ``seed`` is given); its residue joins the output and the chain
    is re-closed so later membership answers stay exact.
    """
    workers = check_workers(workers)
    rng = random.Random(seed) if seed is not None else None
    chain = StabilizerChain.empty(gs.n)
    out: list[Perm] = []
    elems = list(gs.gens)
    while True:
        snapshot = chain
        results = parallel_map(lambda x: sift(x, snapshot), elems, workers)
        failing = [i for i, r in enumerate(results) if not r.member]
        if not failing:
            break
        pick = failing[0] if rng is None else rng.choice(failing)
        residue = results[pick].residue
        out.append(residue)
        chain = _close(chain, [residue])
    return GeneratingSet(gs.n, tuple(out)), chain


# --------------------------------------------------------------------------
# orbits and blocks

class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return sorted(out.values())


def orbits(gs: GeneratingSet) -> list[list[int]]:
    dsu = _DSU(gs.n)
    for g in gs.gens:
        for i, x in enumerate(g):
            dsu.union(i, x)
    return dsu.groups()


def is_transitive(gs: GeneratingSet) -> bool:
    return len(orbits(gs)) <= 1


def _pair_orbit_components(gs: GeneratingSet, seeds) -> list[list[int]]:
    # connected components of the graph whose edges are the images of {0, b}, b in seeds
    dsu = _DSU(gs.n)
    seen = set()
    stack = [(0, b) if 0 < b else (b, 0) for b in seeds]
    seen.update(stack)
    while stack:
        a, b = stack.pop()
        dsu.union(a, b)
        for g in gs.gens:
            e = (g[a], g[b]) if g[a] < g[b] else (g[b], g[a])
            if e not in seen:
                seen.add(e)
                stack.append(e)
    return dsu.groups()


@dataclass(frozen=True)
class BlockSystem:
    blocks: tuple[tuple[int, ...], ...]
    primitive: bool


def minimal_block_system(gs: GeneratingSet) -> BlockSystem:
    """Block system with the fewest (hence largest) proper non-trivial blocks.

    Smallest blocks containing ``{0, b}`` come from connected components of the
    orbit graph of that pair; larger blocks are reached by joining a found
    block with one more point and repeating.
    """
    if not is_transitive(gs):
        raise NotTransitiveError("block systems are defined for transitive groups only")
    n = gs.n
    found: dict[tuple[int, ...], list[list[int]]] = {}
    frontier = []
    for b in range(1, n):
        comps = _pair_orbit_components(gs, [b])
        block = tuple(comps[0])
        if len(block) < n and block not in found:
            found[block] = comps
            frontier.append(block)
    while frontier:
        block = frontier.pop()
        for c in range(1, n):
            if c in block:
                continue
            comps = _pair_orbit_components(gs, [x for x in block if x] + [c])
            bigger = tuple(comps[0])
            if len(bigger) < n and bigger not in found:
                found[bigger] = comps
                frontier.append(bigger)
    if not found:
        return BlockSystem(tuple((i,) for i in range(n)), True)
    best = min(found, key=lambda blk: (-len(blk), blk))
    return BlockSystem(tuple(tuple(c) for c in found[best]), False)
