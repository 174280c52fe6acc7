import itertools

import numpy as np
import pytest
from hypothesis import given

from pargi.errors import CapExceededError
from pargi.graph import Graph, HARD_PAIRS, hard_pair, make_complete, make_cycle, make_path, make_random
from pargi.partition import VertexPartition
from pargi.refinement import color_refine
from pargi.solver import (
    REFINERS,
    brute_force_iso,
    individualize,
    iso,
    verify_isomorphism,
)

from oracles import atlas, nx_isomorphic, random_perm
from strategies import graph_and_perm, graphs

STAR = Graph(4, [(0, 1), (0, 2), (0, 3)])


def classes(colors):
    out = {}
    for v, c in enumerate(colors):
        out.setdefault(int(c), set()).add(v)
    return sorted(out.values(), key=min)


# individualize --------------------------------------------------------------

def test_individualize_singleton_noop():
    vp = VertexPartition(np.array([0, 1, 1]), 2)
    assert classes(individualize(vp, 0).color_of) == classes(vp.color_of)


def test_individualize_k3():
    vp = color_refine(make_complete(3)).partition
    assert classes(individualize(vp, 0).color_of) == [{0}, {1, 2}]


def test_individualize_p4_then_refine():
    g = make_path(4)
    vp = color_refine(g).partition
    assert classes(vp.color_of) == [{0, 3}, {1, 2}]
    ind = individualize(vp, 0)
    r = color_refine(g.with_colors(ind.color_of)).partition
    assert classes(r.color_of) == [{0}, {1}, {2}, {3}]
    assert classes(ind.color_of) == [{0}, {1, 2}, {3}]


def test_individualize_range():
    with pytest.raises(IndexError):
        individualize(VertexPartition(np.zeros(3, dtype=np.int64), 1), 3)


# iso ------------------------------------------------------------------------

def test_iso_k3_c3():
    r = iso(make_complete(3), make_cycle(3))
    assert r.verdict == "isomorphic" and verify_isomorphism(make_complete(3), make_cycle(3), r.witness)


def test_iso_c6_2c3():
    a, b = hard_pair("c6-vs-2c3")
    r = iso(a, b)
    assert r.verdict == "not isomorphic" and r.witness is None
    assert r.max_depth >= 1  # needed a branch
    assert brute_force_iso(a, b).verdict == "not isomorphic"


def test_iso_p4_star_root():
    r = iso(make_path(4), STAR)
    assert r.verdict == "not isomorphic" and r.nodes_explored == 1 and r.max_depth == 0


def test_iso_size_mismatch():
    assert iso(make_path(3), make_path(4)).verdict == "not isomorphic"
    assert iso(Graph(0), Graph(0)).verdict == "isomorphic"


@pytest.mark.parametrize("name", sorted(HARD_PAIRS))
@pytest.mark.parametrize("refiner", REFINERS)
def test_iso_hard_pairs(name, refiner):
    a, b = hard_pair(name)
    if refiner == "gadget-kwl" and a.n > 8:
        pytest.skip("gadget too large for a unit test")
    assert iso(a, b, refiner=refiner).verdict == "not isomorphic"
    rng = np.random.default_rng(0)
    p = random_perm(rng, a.n)
    r = iso(a, a.relabel(p), refiner=refiner)
    assert r.verdict == "isomorphic" and verify_isomorphism(a, a.relabel(p), r.witness)


@given(graph_and_perm(max_n=10, colors=2))
def test_iso_self_relabel(gp):
    g, perm = gp
    h = g.relabel(perm)
    r = iso(g, h)
    assert r.verdict == "isomorphic"
    assert verify_isomorphism(g, h, r.witness)


@given(graphs(max_n=7, colors=2), graphs(max_n=7, colors=2))
def test_iso_agrees_with_networkx(g, h):
    r = iso(g, h)
    assert (r.verdict == "isomorphic") == nx_isomorphic(g, h)
    if r.witness is not None:
        assert verify_isomorphism(g, h, r.witness)


def test_iso_respects_colors():
    g = make_path(3)
    assert iso(g.with_colors([1, 0, 0]), g.with_colors([0, 0, 1])).verdict == "isomorphic"
    assert iso(g.with_colors([0, 1, 0]), g.with_colors([1, 0, 0])).verdict == "not isomorphic"


def test_iso_node_budget():
    a, b = hard_pair("rook4-vs-shrikhande")
    r = iso(a, b, node_budget=3)
    assert r.verdict == "inconclusive" and r.witness is None


@pytest.mark.parametrize("refiner", ["cr", "wl2-log-sim"])
def test_iso_worker_counts_identical(refiner):
    rng = np.random.default_rng(4)
    pairs = [hard_pair("c6-vs-2c3"), hard_pair("rook4-vs-shrikhande")]
    g = make_random(14, 0.3, 2)
    pairs.append((g, g.relabel(random_perm(rng, 14))))
    c = make_cycle(12)
    pairs.append((c, c.relabel(random_perm(rng, 12))))
    for a, b in pairs:
        outs = {iso(a, b, refiner=refiner, workers=w).to_json(timing=False) for w in (1, 2, 8)}
        assert len(outs) == 1, outs


def test_dead_nodes_have_no_extension():
    # every root child killed by a histogram mismatch really has no isomorphism extending it
    for g in atlas(5):
        for h in atlas(5):
            if g.n != h.n or g.m != h.m:
                continue
            vg = color_refine(g).partition
            vh = color_refine(h).partition
            if not np.array_equal(vg.histogram(), vh.histogram()):
                assert brute_force_iso(g, h).verdict == "not isomorphic"
                continue
            cells = np.where(vg.histogram() > 1, vg.histogram(), g.n + 1)
            if cells.min() > g.n:
                continue
            cell = int(np.argmin(cells))
            v = int(np.flatnonzero(vg.color_of == cell)[0])
            rg = color_refine(g.with_colors(individualize(vg, v).color_of)).partition
            for w in np.flatnonzero(vh.color_of == cell).tolist():
                rh = color_refine(h.with_colors(individualize(vh, w).color_of)).partition
                if not np.array_equal(rg.histogram(), rh.histogram()):
                    gg = g.with_colors(np.eye(g.n, dtype=np.int64)[v])
                    hh = h.with_colors(np.eye(h.n, dtype=np.int64)[w])
                    assert brute_force_iso(gg, hh).verdict == "not isomorphic"


def test_result_json():
    r = iso(make_path(3), make_path(3))
    d = r.to_dict()
    assert set(d) == {"schema_version", "verdict", "witness", "nodes_explored", "max_depth",
                      "wall_time_ms"}
    assert "wall_time_ms" not in r.to_dict(timing=False)


# brute force ----------------------------------------------------------------

def test_brute_examples():
    assert brute_force_iso(make_complete(3), make_cycle(3)).verdict == "isomorphic"
    r = brute_force_iso(*hard_pair("c6-vs-2c3"))
    assert r.verdict == "not isomorphic" and r.nodes_explored == 720
    g = make_random(6, 0.5, 1)
    assert brute_force_iso(g, g).witness == tuple(range(6))


def test_brute_least_witness():
    g, h = make_path(4), make_path(4).relabel([2, 0, 3, 1])
    want = next(p for p in itertools.permutations(range(4)) if verify_isomorphism(g, h, p))
    assert brute_force_iso(g, h).witness == want


def test_brute_cap():
    with pytest.raises(CapExceededError):
        brute_force_iso(make_path(9), make_path(9))
    assert brute_force_iso(make_path(9), make_path(9), cap=9).verdict == "isomorphic"


def test_verify_rejects():
    assert not verify_isomorphism(make_path(3), make_path(3), [0, 0, 1])
    assert not verify_isomorphism(make_path(3), make_path(3), [1, 0, 2])
    assert verify_isomorphism(make_path(3), make_path(3), [2, 1, 0])
