"""Parallel Weisfeiler-Leman refinement, permutation-group primitives and an IR isomorphism test."""

from .errors import (
    BudgetExceededError,
    CapExceededError,
    IndexSpaceError,
    NotTransitiveError,
    ParseError,
    PargiError,
)
from .gadget import GadgetGraph, build_gadget, simulate_kwl_via_cr
from .graph import (
    Graph,
    hard_pair,
    make_complete,
    make_cycle,
    make_path,
    make_random,
    parse_edgelist,
    parse_graph6,
    read_graph,
    read_graphs,
    to_edgelist,
    to_graph6,
)
from .partition import (
    PairColoring,
    RefinementReport,
    TupleColoring,
    VertexPartition,
    distinguishes,
    partition_refines,
    partitions_equal,
)
from .permgroup import (
    GeneratingSet,
    StabilizerChain,
    compose,
    contains,
    group_order,
    inverse,
    minimal_block_system,
    orbits,
    refine_generating_set,
    schreier_sims,
    sift,
)
from .refinement import (
    color_refine,
    color_refine_naive,
    simulate_cr_by_wl2,
    walk_refine,
    wl2_refine,
    wlk_refine,
)
from .solver import IsoResult, brute_force_iso, individualize, iso, verify_isomorphism

__version__ = "0.1.0"
