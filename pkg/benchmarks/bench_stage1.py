"""Benchmark the stage-1 merge scheduler: numba kernel vs pure Python.

Generates seeded random graphs with a fixed edge/vertex ratio, runs the
scheduler under both backends, verifies they agree, and prints per-size
timings with the speedup. Use --json to also dump machine-readable results.

The pure-Python backend is the bottleneck: on these graphs the greedy
builds deep trees (h_max grows with n), so cost rises steeply with size.
Sizes beyond the defaults are fine for the numba column but take minutes
in pure Python.

    python3 benchmarks/bench_stage1.py
    python3 benchmarks/bench_stage1.py --sizes 1024,8192 --repeats 3
    SETREE_NO_NUMBA=1 python3 benchmarks/bench_stage1.py   # python only
"""

import argparse
import json
import math
import time

import numpy as np

from setree import NUMBA_AVAILABLE, Graph, active_backend, merge_schedule, warmup


def make_graph(n: int, edge_factor: int, rng: np.random.Generator) -> Graph:
    target = edge_factor * n
    cap = n * (n - 1) // 2
    if target > cap:
        raise SystemExit(f"cannot place {target} distinct edges on {n} vertices")
    seen = set()
    while len(seen) < target:
        pairs = rng.integers(0, n, size=(target, 2))
        for u, v in pairs:
            if u == v:
                continue
            a, b = (int(u), int(v)) if u < v else (int(v), int(u))
            seen.add((a, b))
            if len(seen) == target:
                break
    return Graph(n, sorted(seen))


def timed_schedules(g: Graph, backend: str, repeats: int):
    """Best wall time over ``repeats`` runs, plus the (identical) schedule."""
    best = math.inf
    sched = None
    for _ in range(repeats):
        start = time.perf_counter()
        sched = merge_schedule(g, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, sched


def schedule_h_max(g: Graph, sched) -> int:
    heights = [0] * (g.n + len(sched))
    live = set(range(g.n))
    for i, (l, r) in enumerate(zip(sched.left.tolist(), sched.right.tolist())):
        heights[g.n + i] = max(heights[l], heights[r]) + 1
        live.discard(l)
        live.discard(r)
        live.add(g.n + i)
    return max(heights[s] for s in live) + 1


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--sizes", default="512,1024,2048,4096",
        help="comma-separated vertex counts (default 512..4096)",
    )
    parser.add_argument("--edge-factor", type=int, default=5, help="edges per vertex (default 5)")
    parser.add_argument("--repeats", type=int, default=2, help="take the best of N runs (default 2)")
    parser.add_argument("--seed", type=int, default=0, help="graph generator seed (default 0)")
    parser.add_argument("--json", metavar="FILE", help="also write results as JSON")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rng = np.random.default_rng(args.seed)
    run_numba = NUMBA_AVAILABLE and active_backend() == "numba"
    if run_numba:
        warmup()
    else:
        print("numba backend unavailable or disabled; timing python only")

    header = f"{'n':>8} {'edges':>9} {'h_max':>6} {'python(s)':>11}"
    if run_numba:
        header += f" {'numba(s)':>11} {'speedup':>8}"
    print(header)
    results = []
    for n in sizes:
        g = make_graph(n, args.edge_factor, rng)
        t_py, py = timed_schedules(g, "python", args.repeats)
        h_max = schedule_h_max(g, py)
        row = {"n": n, "edges": g.num_edges, "h_max": h_max, "python_s": t_py}
        line = f"{n:>8} {g.num_edges:>9} {h_max:>6} {t_py:>11.4f}"
        if run_numba:
            t_nb, nb = timed_schedules(g, "numba", args.repeats)
            if not (
                np.array_equal(py.left, nb.left)
                and np.array_equal(py.right, nb.right)
                and np.array_equal(py.cut, nb.cut)
                and np.array_equal(py.delta, nb.delta)
            ):
                raise SystemExit(f"backend mismatch on n={n}: schedules differ")
            row["numba_s"] = t_nb
            row["speedup"] = t_py / t_nb if t_nb > 0 else math.inf
            line += f" {t_nb:>11.4f} {row['speedup']:>7.1f}x"
        print(line, flush=True)
        results.append(row)

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(
                {"edge_factor": args.edge_factor, "repeats": args.repeats,
                 "seed": args.seed, "results": results},
                fh, indent=2,
            )
            fh.write("\n")
        print(f"wrote {args.json}")


if __name__ == "__main__":
    main()
