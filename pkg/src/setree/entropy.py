"""Structural entropy of a graph under a coding tree, plus edit deltas.

The entropy of tree T over graph G is

    H(G, T) = - sum over non-root nodes a of
              (g_a / vol(G)) * log2(vol(a) / vol(parent(a)))

where g_a is the number of edges leaving a's marker and vol is the degree
sum. Terms with g_a = 0 contribute nothing. All logs are base 2, so results
are in bits. Edgeless graphs (volume 0) are rejected everywhere here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .graph import Graph, subset_stats
from .tree import CodingTree, TreeNode, star_tree


@dataclass(frozen=True)
class EntropyReport:
    """Total entropy plus the per-node contributions that sum to it."""

    total: float
    terms: dict  # non-root node id -> term
    log_base: int = 2

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "log_base": self.log_base,
            "terms": {str(k): self.terms[k] for k in sorted(self.terms)},
        }


def _term(g_a: int, vol_a: int, vol_parent: int, vol_g: int) -> float:
    if g_a == 0:
        return 0.0
    return -(g_a / vol_g) * math.log2(vol_a / vol_parent)


def structural_entropy(g: Graph, t: CodingTree) -> EntropyReport:
    """Entropy of ``g`` under tree ``t``, from the tree's cached statistics."""
    vol_g = g.volume
    if vol_g == 0:
        raise ValueError("structural entropy is undefined for an edgeless graph")
    terms = {}
    total = 0.0
    for nid, node in t.nodes.items():
        if node.parent is None:
            continue
        term = _term(node.out_degree, node.volume, t.nodes[node.parent].volume, vol_g)
        terms[nid] = term
        total += term
    return EntropyReport(total=total, terms=terms)


def one_dim_entropy(g: Graph) -> float:
    """Entropy of the degree distribution; equals the star tree's entropy."""
    vol_g = g.volume
    if vol_g == 0:
        raise ValueError("structural entropy is undefined for an edgeless graph")
    total = 0.0
    for d in g.degrees.tolist():
        if d:
            total -= (d / vol_g) * math.log2(d / vol_g)
    return total


def merge_delta(g: Graph, t: CodingTree, vi: int, vj: int) -> float:
    """Exact entropy change from merge(vi, vj), without performing it.

    Always <= 0; equals 0 exactly when no edge crosses between the two
    markers or the pair's volume is the whole graph.
    """
    for v in (vi, vj):
        if v not in t.nodes:
            raise KeyError(f"no node {v}")
        if t.nodes[v].parent != t.root:
            raise ValueError(f"node {v} is not a child of the root")
    if vi == vj:
        raise ValueError("merge delta needs two distinct nodes")
    vol_g = g.volume
    if vol_g == 0:
        raise ValueError("structural entropy is undefined for an edgeless graph")
    cut = t.cut_between(vi, vj)
    if cut == 0:
        return 0.0
    vol_e = t.nodes[vi].volume + t.nodes[vj].volume
    return (2.0 * cut / vol_g) * math.log2(vol_e / vol_g)


def delete_delta(g: Graph, t: CodingTree, v: int) -> float:
    """Exact entropy change from delete(v), without performing it. Always >= 0."""
    node = t.nodes.get(v)
    if node is None:
        raise KeyError(f"no node {v}")
    if node.parent is None:
        raise ValueError("cannot delete the root")
    if node.is_leaf:
        raise ValueError(f"node {v} is a leaf; only internal nodes can be deleted")
    vol_g = g.volume
    if vol_g == 0:
        raise ValueError("structural entropy is undefined for an edgeless graph")
    dgsum = sum(t.nodes[c].out_degree for c in node.children) - node.out_degree
    if dgsum == 0:
        return 0.0
    vol_parent = t.nodes[node.parent].volume
    return (dgsum / vol_g) * math.log2(vol_parent / node.volume)


# --------------------------------------------------------------- brute force

def _set_partitions(items):
    """Every partition of ``items``; deterministic order, blocks as frozensets."""
    items = tuple(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] | {first}] + sub[i + 1 :]
        yield [frozenset((first,))] + sub


def _refinements(partition):
    """Every partition obtained by repartitioning each block independently."""
    per_block = [list(_set_partitions(sorted(block))) for block in partition]
    for combo in itertools.product(*per_block):
        out = []
        for blocks in combo:
            out.extend(blocks)
        yield out


def _chains(top, length):
    """Chains of ``length`` partitions, each refining the one before."""
    if length == 0:
        yield []
        return
    for p in _refinements(top):
        for rest in _chains(p, length - 1):
            yield [p] + rest


def _chain_entropy(g, chain, stats):
    """Entropy of the height-(len(chain)+1) tree described by a partition chain."""
    everything = frozenset(range(g.n))
    levels = [[everything]] + chain + [[frozenset((v,)) for v in range(g.n)]]
    vol_g = g.volume
    total = 0.0
    for upper, lower in zip(levels, levels[1:]):
        by_member = {}
        for block in upper:
            for x in block:
                by_member[x] = block
        for block in lower:
            parent = by_member[next(iter(block))]
            vol_b, cut_b = _stats_of(g, stats, block)
            vol_p, _ = _stats_of(g, stats, parent)
            total += _term(cut_b, vol_b, vol_p, vol_g)
    return total


def _stats_of(g, memo, block):
    got = memo.get(block)
    if got is None:
        st = subset_stats(g, block)
        got = (st.volume, st.cut)
        memo[block] = got
    return got


def _tree_from_chain(g: Graph, chain, stats) -> CodingTree:
    """Materialize the coding tree a partition chain describes."""
    nodes: dict = {}
    leaf_of: dict = {}
    for v in range(g.n):
        d = g.degree(v)
        nodes[v] = TreeNode(
            parent=None, children=[], height=0, volume=d, out_degree=d,
            leaf_vertex=v, min_leaf=v, max_leaf=v,
        )
        leaf_of[v] = v
    root_id = g.n
    next_id = g.n + 1
    below = {frozenset((v,)): v for v in range(g.n)}
    for height, partition in enumerate(reversed(chain), start=1):
        current = {}
        for block in sorted(partition, key=min):
            members = set(block)
            kids = [below[b] for b in below if b <= members]
            kids.sort(key=lambda nid: nodes[nid].min_leaf)
            vol_b, cut_b = _stats_of(g, stats, block)
            nodes[next_id] = TreeNode(
                parent=None, children=kids, height=height, volume=vol_b,
                out_degree=cut_b, min_leaf=min(block), max_leaf=max(block),
            )
            for c in kids:
                nodes[c].parent = next_id
            current[block] = next_id
            next_id += 1
        below = current
    top_kids = sorted(below.values(), key=lambda nid: nodes[nid].min_leaf)
    nodes[root_id] = TreeNode(
        parent=None, children=top_kids, height=len(chain) + 1, volume=g.volume,
        out_degree=0, min_leaf=0, max_leaf=g.n - 1,
    )
    for c in top_kids:
        nodes[c].parent = root_id
    return CodingTree(g, nodes, root_id, leaf_of)


def brute_force_k_entropy(g: Graph, k: int):
    """Exact minimum entropy over all coding trees of height at most ``k``.

    Enumerates every chain of nested vertex partitions (the levels of a
    candidate tree), so it is only usable on tiny graphs: n <= 8 when k <= 2,
    n <= 6 otherwise. Returns (optimum, witness tree); the witness has height
    exactly k, padded with pass-through nodes where the optimum is shallower.
    """
    if k < 1:
        raise ValueError("tree height bound must be at least 1")
    if g.volume == 0:
        raise ValueError("structural entropy is undefined for an edgeless graph")
    limit = 8 if k <= 2 else 6
    if g.n > limit:
        raise ValueError(f"brute force is capped at {limit} vertices for k={k}")
    stats: dict = {}
    everything = frozenset(range(g.n))
    best = math.inf
    best_chain = None
    for chain in _chains([everything], k - 1):
        h = _chain_entropy(g, chain, stats)
        if h < best - 1e-15:
            best = h
            best_chain = chain
    tree = _tree_from_chain(g, best_chain, stats)
    return best, tree
