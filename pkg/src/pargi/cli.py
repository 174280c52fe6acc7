"""``pargi`` command line.

Exit codes (stable):

    0  success; for ``iso`` also the verdict "isomorphic"
    1  ``iso`` verdict "not isomorphic"
    2  unreadable or malformed input
    3  memory budget exceeded
    4  ``iso`` inconclusive (node budget exhausted)
    5  ``bench`` found partitions that differ between worker counts

Every flag can be preset through an environment variable named
``PARGI_<FLAG>`` (``--node-budget`` -> ``PARGI_NODE_BUDGET``); explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

from . import kernels
from .errors import BudgetExceededError, NotTransitiveError, ParseError
from .gadget import build_gadget, simulate_kwl_via_cr
from .graph import make_random, read_graph, read_graphs, to_edgelist, hard_pair
from .partition import SCHEMA_VERSION, RefinementReport
from .permgroup import (
    GeneratingSet,
    check_perm,
    from_cycles,
    group_order,
    minimal_block_system,
    orbits,
    refine_generating_set,
    schreier_sims,
    sift,
    to_cycles,
)
from .refinement import (
    color_refine,
    initial_pair_coloring,
    simulate_cr_by_wl2,
    walk_rounds,
    wl2_refine,
    wl2_round,
    wlk_refine,
)
from .solver import INCONCLUSIVE, ISOMORPHIC, REFINERS, iso

EXIT_OK = 0
EXIT_NOT_ISOMORPHIC = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_INCONCLUSIVE = 4
EXIT_NONDETERMINISM = 5

REFINE_ALGOS = ("cr", "wl2", "walk", "kwl", "cr-via-wl2", "kwl-via-gadget")
BENCH_ALGOS = ("cr", "wl2", "cr-via-wl2", "kwl")
GROUP_ACTIONS = ("orbits", "blocks", "refine-gens", "order", "member")
BENCH_HEADER = ["graph", "algorithm", "workers", "backend", "rounds", "wall_time_ms",
                "speedup_vs_1_worker"]


def _env(name, default=None):
    return os.environ.get("PARGI_" + name, default)


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _optional_int(text):
    return None if text in (None, "") else int(text)


def _common(p: argparse.ArgumentParser, algos=None, algo_default=None) -> None:
    if algos:
        p.add_argument("--algo", choices=algos, default=_env("ALGO", algo_default))
    p.add_argument("--k", type=_positive, default=int(_env("K", 2)))
    p.add_argument("--max-rounds", type=_optional_int, default=_optional_int(_env("MAX_ROUNDS")))
    p.add_argument("--workers", type=_positive, default=int(_env("WORKERS", 1)))
    p.add_argument("--seed", type=int, default=_optional_int(_env("SEED")))
    p.add_argument("--out", default=_env("OUT"))
    p.add_argument("--format", choices=("json", "text"), default=_env("FORMAT", "json"))
    p.add_argument("--node-budget", type=_optional_int, default=_optional_int(_env("NODE_BUDGET")))
    p.add_argument("--memory-budget", type=_optional_int,
                   default=_optional_int(_env("MEMORY_BUDGET")))
    p.add_argument("--backend", choices=kernels.BACKENDS, default=None)
    p.add_argument("--no-timing", action="store_true",
                   default=_env("NO_TIMING", "") not in ("", "0"),
                   help="omit wall-clock fields so output is byte-reproducible")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pargi", description=__doc__.split("\n\n")[0],
                                 formatter_class=argparse.RawDescriptionHelpFormatter,
                                 epilog=__doc__.split("\n\n", 1)[1])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("refine", help="run a refinement algorithm on one graph")
    p.add_argument("graph")
    p.add_argument("--length", type=_positive, default=int(_env("LENGTH", 2)),
                   help="walk length for --algo walk")
    _common(p, REFINE_ALGOS, "cr")

    p = sub.add_parser("iso", help="decide isomorphism of two graphs")
    p.add_argument("graph1")
    p.add_argument("graph2")
    _common(p, REFINERS, "cr")

    p = sub.add_parser("group", help="permutation group queries")
    p.add_argument("action", choices=GROUP_ACTIONS)
    p.add_argument("generators", help="JSON list of image arrays, or {\"n\": .., \"generators\": [..]}")
    p.add_argument("--element", help="image array (JSON) or cycle notation, for 'member'")
    _common(p)

    p = sub.add_parser("bench", help="time refinement across worker counts")
    p.add_argument("corpus", nargs="?", help="directory of graph files (default: built-in corpus)")
    p.add_argument("--worker-counts", default=_env("WORKER_COUNTS", "1,2,4"),
                   help="comma-separated worker counts")
    p.add_argument("--repeat", type=_positive, default=int(_env("REPEAT", 3)))
    p.add_argument("--random", metavar="N:P", default=_env("RANDOM"),
                   help="bench a single random graph instead of a corpus")
    _common(p, BENCH_ALGOS, "cr")

    p = sub.add_parser("gadget", help="write the tuple gadget graph and its layout sidecar")
    p.add_argument("graph")
    p.add_argument("--sidecar", help="path of the JSON layout (default: <out>.json)")
    _common(p)
    return ap


# --------------------------------------------------------------------------
# output helpers

def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _report_text(r: RefinementReport) -> str:
    lines = [f"algorithm: {r.algorithm}", f"n: {r.n}  k: {r.k}",
             f"rounds: {r.rounds}  stabilized: {r.stabilized}",
             f"colors per round: {' '.join(map(str, r.color_counts))}",
             f"classes: {r.partition.num_colors}"]
    if r.partition.flat.size <= 256:
        lines.append("partition: " + " ".join(map(str, r.partition.flat.tolist())))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# refine

def _walk_report(g, length, workers) -> RefinementReport:
    pc = initial_pair_coloring(g)
    counts = [pc.num_colors]
    for _ in range(walk_rounds(length)):
        pc = wl2_round(pc, workers)
        counts.append(pc.num_colors)
    stable = wl2_round(pc, workers).num_colors == pc.num_colors
    return RefinementReport("walk", pc, walk_rounds(length), stable, counts, 2,
                            {"walk_length": length})


def run_refinement(g, algo, k=2, max_rounds=None, workers=1, memory_budget=None,
                   length=2) -> RefinementReport:
    if algo == "cr":
        return color_refine(g, max_rounds, workers)
    if algo == "wl2":
        return wl2_refine(g, max_rounds, workers)
    if algo == "walk":
        return _walk_report(g, length, workers)
    if algo == "kwl":
        return wlk_refine(g, k, max_rounds, workers, memory_budget)
    if algo == "cr-via-wl2":
        return simulate_cr_by_wl2(g, workers, max_rounds)
    if algo == "kwl-via-gadget":
        tc, rep = simulate_kwl_via_cr(g, k, "parallel", workers, memory_budget)
        return RefinementReport("kwl-via-gadget", tc, rep.rounds, rep.stabilized,
                                rep.color_counts, k, {"gadget_vertices": rep.n})
    raise ValueError(f"unknown algorithm {algo!r}")


def cmd_refine(args) -> int:
    g = read_graph(args.graph)
    r = run_refinement(g, args.algo, args.k, args.max_rounds, args.workers,
                       args.memory_budget, args.length)
    _emit(args, r.to_json() if args.format == "json" else _report_text(r))
    return EXIT_OK


# --------------------------------------------------------------------------
# iso

def cmd_iso(args) -> int:
    g1, g2 = read_graph(args.graph1), read_graph(args.graph2)
    res = iso(g1, g2, args.algo, args.workers, args.node_budget, args.k)
    if args.format == "json":
        _emit(args, res.to_json(timing=not args.no_timing))
    else:
        lines = [f"verdict: {res.verdict}", f"nodes explored: {res.nodes_explored}",
                 f"max depth: {res.max_depth}"]
        if res.witness is not None:
            lines.append("witness: " + " ".join(map(str, res.witness)))
        if not args.no_timing:
            lines.append(f"wall time: {res.wall_time_ms:.3f} ms")
        _emit(args, "\n".join(lines))
    if res.verdict == ISOMORPHIC:
        return EXIT_OK
    if res.verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_NOT_ISOMORPHIC


# --------------------------------------------------------------------------
# group

def load_generators(path) -> GeneratingSet:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None
    if isinstance(data, dict):
        gens, n = data.get("generators", []), data.get("n")
    else:
        gens, n = data, None
    if not isinstance(gens, list):
        raise ParseError(f"{path}: generators must be a JSON list")
    if n is None:
        if not gens:
            raise ParseError(f"{path}: empty generator list needs an explicit 'n'")
        n = len(gens[0]) if isinstance(gens[0], list) else None
    if not isinstance(n, int) or n < 0:
        raise ParseError(f"{path}: cannot determine degree n")
    return GeneratingSet(n, tuple(check_perm(x, n) for x in gens))


def _parse_element(text, n):
    text = text.strip()
    if text.startswith("("):
        return from_cycles(text, n)
    try:
        return check_perm(json.loads(text), n)
    except json.JSONDecodeError:
        raise ParseError(f"element {text!r} is neither JSON nor cycle notation") from None


def cmd_group(args) -> int:
    gs = load_generators(args.generators)
    out = {"schema_version": SCHEMA_VERSION, "action": args.action, "n": gs.n}
    if args.action == "orbits":
        out["orbits"] = orbits(gs)
        text = " ".join("{" + ",".join(map(str, o)) + "}" for o in out["orbits"])
    elif args.action == "order":
        out["order"] = group_order(schreier_sims(gs))
        text = str(out["order"])
    elif args.action == "blocks":
        try:
            bs = minimal_block_system(gs)
        except NotTransitiveError as e:
            raise ParseError(str(e)) from None
        out["blocks"] = [list(b) for b in bs.blocks]
        out["primitive"] = bs.primitive
        text = ("primitive" if bs.primitive else
                " ".join("{" + ",".join(map(str, b)) + "}" for b in bs.blocks))
    elif args.action == "refine-gens":
        new, chain = refine_generating_set(gs, args.seed, args.workers)
        out["input_size"] = len(gs)
        out["generators"] = [list(p) for p in new.gens]
        out["cycles"] = [to_cycles(p) for p in new.gens]
        out["order"] = group_order(chain)
        text = "\n".join(out["cycles"]) or "()"
    else:
        if not args.element:
            raise ParseError("'member' needs --element")
        x = _parse_element(args.element, gs.n)
        res = sift(x, schreier_sims(gs))
        out["element"] = list(x)
        out["member"] = res.member
        out["drop_level"] = res.drop_level
        text = "member" if res.member else f"not a member (drops at level {res.drop_level})"
    _emit(args, _dumps(out) if args.format == "json" else text)
    return EXIT_OK


# --------------------------------------------------------------------------
# bench

def _builtin_corpus(seed):
    seed = 0 if seed is None else seed
    graphs = []
    for name in ("c6-vs-2c3", "rook4-vs-shrikhande"):
        a, b = hard_pair(name)
        graphs += [(f"{name}[0]", a), (f"{name}[1]", b)]
    graphs += [(f"random-200-0.05-s{seed}", make_random(200, 0.05, seed)),
               (f"random-500-0.02-s{seed}", make_random(500, 0.02, seed))]
    return graphs


def _bench_corpus(args):
    if args.random:
        try:
            n_text, p_text = args.random.split(":")
            n, p = int(n_text), float(p_text)
        except ValueError:
            raise ParseError(f"--random expects N:P, got {args.random!r}") from None
        seed = 0 if args.seed is None else args.seed
        return [(f"random-{n}-{p}-s{seed}", make_random(n, p, seed))]
    if args.corpus is None:
        return _builtin_corpus(args.seed)
    root = Path(args.corpus)
    if not root.is_dir():
        raise ParseError(f"{root}: not a directory")
    out = []
    for path in sorted(q for q in root.iterdir() if q.is_file()):
        for i, g in enumerate(read_graphs(path)):
            out.append((f"{path.name}#{i}", g))
    return out


def _worker_counts(text):
    try:
        counts = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"bad worker list {text!r}") from None
    if not counts or min(counts) < 1:
        raise ParseError(f"bad worker list {text!r}")
    return counts


def cmd_bench(args) -> int:
    counts = _worker_counts(args.worker_counts)
    corpus = _bench_corpus(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    status = EXIT_OK
    for name, g in corpus:
        runs = {}
        for wk in sorted(set(counts) | {1}):
            best, rep = float("inf"), None
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                rep = run_refinement(g, args.algo, args.k, args.max_rounds, wk, args.memory_budget)
                best = min(best, time.perf_counter() - t0)
            runs[wk] = (best * 1e3, rep)
        reference = runs[1][1].to_json()
        if any(r.to_json() != reference for _, r in runs.values()):
            print(f"determinism failure on {name}: partitions differ across worker counts",
                  file=sys.stderr)
            status = EXIT_NONDETERMINISM
            continue
        base = runs[1][0]
        for wk in counts:
            ms, rep = runs[wk]
            w.writerow([name, args.algo, wk, kernels.backend_name(), rep.rounds,
                        f"{ms:.3f}", f"{base / ms:.3f}" if ms > 0 else "inf"])
    _emit(args, buf.getvalue().rstrip("\n"))
    return status


# --------------------------------------------------------------------------
# gadget

def cmd_gadget(args) -> int:
    g = read_graph(args.graph)
    gg = build_gadget(g, args.k, args.memory_budget, args.workers)
    _emit(args, to_edgelist(gg.graph).rstrip("\n"))
    sidecar = args.sidecar or (args.out + ".json" if args.out else None)
    if sidecar:
        Path(sidecar).write_text(gg.mapping_json() + "\n")
    return EXIT_OK


COMMANDS = {"refine": cmd_refine, "iso": cmd_iso, "group": cmd_group,
            "bench": cmd_bench, "gadget": cmd_gadget}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    except ValueError as e:  # malformed PARGI_* value
        print(f"pargi: {e}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.backend:
            kernels.set_backend(args.backend)
        return COMMANDS[args.command](args)
    except BudgetExceededError as e:
        print(f"pargi: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, OSError, ValueError) as e:
        print(f"pargi: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
