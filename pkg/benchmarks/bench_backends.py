"""Compare the numba and numpy kernel backends, and worker counts, on refinement rounds.

    python benchmarks/bench_backends.py --n 2000 --p 0.01 --workers 1,2,4 --repeat 3

Prints CSV: case, backend, workers, rounds, wall_time_ms, speedup_vs_numpy_1_worker.
Each backend is warmed up once before timing so JIT compilation is excluded.
Partitions are checked for equality across every backend/worker combination.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

from pargi import kernels
from pargi.graph import make_random
from pargi.refinement import color_refine, simulate_cr_by_wl2, wlk_refine


def cases(n, p, seed):
    g = make_random(n, p, seed)
    small = make_random(max(8, n // 20), min(1.0, p * 20), seed)
    tiny = make_random(max(6, n // 100), min(1.0, p * 50), seed)
    return [
        (f"cr n={g.n}", lambda w: color_refine(g, workers=w)),
        (f"cr-via-wl2 n={small.n}", lambda w: simulate_cr_by_wl2(small, workers=w)),
        (f"kwl3 n={tiny.n}", lambda w: wlk_refine(tiny, 3, workers=w)),
    ]


def timed(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--p", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", default="1,2,4")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    workers = [int(x) for x in args.workers.split(",")]

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["case", "backend", "workers", "rounds", "wall_time_ms",
                "speedup_vs_numpy_1_worker"])
    ok = True
    for name, run in cases(args.n, args.p, args.seed):
        rows, reference, base = [], None, None
        for backend in kernels.BACKENDS:
            with kernels.use_backend(backend):
                run(1)  # warm-up / JIT
                for wk in workers:
                    ms, rep = timed(lambda: run(wk), args.repeat)
                    if reference is None:
                        reference = rep.to_json()
                    elif rep.to_json() != reference:
                        ok = False
                        print(f"mismatch: {name} {backend} workers={wk}", file=sys.stderr)
                    if backend == "numpy" and wk == 1:
                        base = ms
                    rows.append([name, backend, wk, rep.rounds, ms])
        for name_, backend, wk, rounds, ms in rows:
            speed = f"{base / ms:.2f}" if base else ""
            w.writerow([name_, backend, wk, rounds, f"{ms:.2f}", speed])
    return 0 if ok else 5


if __name__ == "__main__":
    sys.exit(main())
