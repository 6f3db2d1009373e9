"""Command-line interface.

All subcommands print one JSON document to stdout (or --output FILE) with
floats rounded to 7 significant digits; diagnostics go to stderr and any
failure exits nonzero with a single-line message. Identical invocations are
byte-identical in output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import encoder as enc
from .circa import circa, random_tree
from .entropy import brute_force_k_entropy, structural_entropy
from .graph import GraphFormatError, from_edge_list, from_taxonomy, taxonomy_stats
from .metrics import PredictionSet, macro_f1, micro_f1
from .tree import CodingTree, star_tree, validate


def _round7(obj):
    if isinstance(obj, float):
        return float(f"{obj:.7g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round7(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round7(v) for v in obj]
    return obj


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_graph(args):
    text = _read_text(args.input)
    if args.format == "taxonomy":
        return from_taxonomy(text)
    return from_edge_list(text)


def _load_tree(path: str, graph):
    doc = json.loads(_read_text(path))
    t = CodingTree.from_json(doc, graph)
    if graph is not None:
        report = validate(t, graph)
        if not report.ok:
            first = report.issues[0]
            raise ValueError(
                f"tree failed validation (property {first.prop}"
                f"{'' if first.node is None else f' at node {first.node}'}): {first.message}"
            )
    return t


def _check_k(k: int) -> int:
    if k < 1:
        raise ValueError("k must be at least 1")
    return k


def _cmd_ingest(args):
    g = _load_graph(args)
    out = {"vertices": g.n, "edges": g.num_edges, "volume": g.volume}
    if args.format == "taxonomy":
        info = taxonomy_stats(_read_text(args.input))
        out["root"] = info.root
        out["labels"] = info.n_labels
        out["depth"] = info.depth
        if info.multi_parent:
            out["multi_parent_labels"] = list(info.multi_parent)
    return out


def _cmd_entropy(args):
    g = _load_graph(args)
    if args.tree == "star":
        t = star_tree(g)
    else:
        t = _load_tree(args.tree, g)
    return structural_entropy(g, t).to_json()


def _cmd_circa(args):
    g = _load_graph(args)
    t, trace = circa(g, _check_k(args.k))
    out = {"k": args.k, "tree": t.to_json(), "entropy": trace.final_entropy}
    if args.trace:
        out["trace"] = trace.to_json()
    return out


def _cmd_random_tree(args):
    g = _load_graph(args)
    t = random_tree(g, _check_k(args.k), args.seed)
    total = structural_entropy(g, t).total
    return {"k": args.k, "seed": args.seed, "tree": t.to_json(), "entropy": total}


def _cmd_compare(args):
    g = _load_graph(args)
    k = _check_k(args.k)
    if args.trials < 1:
        raise ValueError("trials must be at least 1")
    _, trace = circa(g, k)
    randoms = []
    for seed in range(args.trials):
        t = random_tree(g, k, seed)
        randoms.append(structural_entropy(g, t).total)
    out = {
        "k": k,
        "trials": args.trials,
        "circa_entropy": trace.final_entropy,
        "random_mean_entropy": float(np.mean(randoms)),
        "random_min_entropy": float(np.min(randoms)),
    }
    if g.n <= 6:
        optimum, _ = brute_force_k_entropy(g, k)
        out["brute_force_entropy"] = optimum
    return out


def _cmd_encode(args):
    t = _load_tree(args.tree, None)
    w = enc.weights_from_json(json.loads(_read_text(args.weights)))
    tokens = _read_text(args.input).split()
    if not tokens:
        raise ValueError("input vector file is empty")
    try:
        h = np.array([float(x) for x in tokens], dtype=np.float64)
    except ValueError:
        raise ValueError("input vector file must contain only numbers") from None
    h_t, p = enc.forward(t, w, h)
    return {"h_t": h_t.tolist(), "probabilities": p.tolist()}


def _load_rows(path: str) -> np.ndarray:
    rows = []
    width = None
    for lineno, raw in enumerate(_read_text(path).splitlines(), 1):
        if raw.lstrip().startswith("#") or not raw.split():
            continue
        try:
            row = [float(x) for x in raw.split()]
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError(f"{path}: line {lineno}: expected {width} columns, got {len(row)}")
        rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def _cmd_evaluate(args):
    pred = _load_rows(args.pred)
    gold = _load_rows(args.gold)
    ps = PredictionSet(probabilities=pred, truth=gold, threshold=args.threshold)
    return {
        "documents": int(ps.truth.shape[0]),
        "labels": int(ps.truth.shape[1]),
        "threshold": args.threshold,
        "micro_f1": micro_f1(ps),
        "macro_f1": macro_f1(ps),
    }


def _cmd_sweep_k(args):
    g = _load_graph(args)
    lo, hi = _check_k(args.k_min), _check_k(args.k_max)
    if hi < lo:
        raise ValueError("k-max must be >= k-min")
    results = []
    for k in range(lo, hi + 1):
        _, trace = circa(g, k)
        results.append({"k": k, "entropy": trace.final_entropy, "h_max": trace.h_max})
    return {"results": results}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setree",
        description="Minimum-entropy coding trees for graphs: build, measure, encode.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the JSON result to this file instead of stdout")

    graphy = argparse.ArgumentParser(add_help=False, parents=[common])
    graphy.add_argument("--input", required=True, help="graph file to read")
    graphy.add_argument(
        "--format", choices=("edgelist", "taxonomy"), default="edgelist",
        help="input format (default: edgelist)",
    )

    p = sub.add_parser("ingest", parents=[graphy], help="parse a graph and print its size")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("entropy", parents=[graphy], help="structural entropy under a tree")
    p.add_argument("--tree", default="star", help="tree JSON file, or 'star' (default)")
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("circa", parents=[graphy], help="greedy minimum-entropy tree")
    p.add_argument("--k", type=int, required=True, help="target tree height")
    p.add_argument("--trace", action="store_true", help="include per-stage deltas")
    p.set_defaults(func=_cmd_circa)

    p = sub.add_parser("random-tree", parents=[graphy], help="seeded random baseline tree")
    p.add_argument("--k", type=int, required=True, help="target tree height")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.set_defaults(func=_cmd_random_tree)

    p = sub.add_parser("compare", parents=[graphy], help="circa vs random baseline entropies")
    p.add_argument("--k", type=int, required=True, help="target tree height")
    p.add_argument("--trials", type=int, default=100, help="random trees to sample (default 100)")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("encode", parents=[common], help="forward pass over a stored tree")
    p.add_argument("--tree", required=True, help="tree JSON file")
    p.add_argument("--weights", required=True, help="weights JSON file")
    p.add_argument("--input", required=True, help="document vector file (whitespace floats)")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("evaluate", parents=[common], help="micro/macro F1 of predictions")
    p.add_argument("--pred", required=True, help="probability rows, one document per line")
    p.add_argument("--gold", required=True, help="0/1 truth rows, one document per line")
    p.add_argument("--threshold", type=float, default=0.5, help="decision threshold")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep-k", parents=[graphy], help="circa entropy across tree heights")
    p.add_argument("--k-min", type=int, default=1, help="smallest height (default 1)")
    p.add_argument("--k-max", type=int, default=4, help="largest height (default 4)")
    p.set_defaults(func=_cmd_sweep_k)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (ValueError, KeyError, OSError, GraphFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(_round7(result), indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
