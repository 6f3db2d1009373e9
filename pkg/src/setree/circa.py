"""Greedy construction of low-entropy coding trees of bounded height.

Three stages:

1. Pair root children bottom-up, always taking the merge with the most
   negative entropy delta (ties to the lexicographically smallest min-leaf
   pair), until the root has at most two children. Components with no
   remaining crossing edges fold together at zero cost.
2. While the tree is taller than K, delete the internal node whose removal
   raises entropy the least (ties to smallest min-leaf, then max-leaf, then
   node id).
3. Entropy-neutral repair: interpose pass-through nodes so every parent sits
   exactly one level above its children, then pad whole levels until the
   height is exactly K.

Stage 2's candidate heap uses lazy invalidation: deleting a node re-keys only
its parent and its re-parented internal children (those are the only nodes
whose delta can change).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .agglomerate import MergeSchedule, merge_schedule
from .entropy import delete_delta, structural_entropy
from .graph import Graph
from .tree import CodingTree, TreeNode, star_tree


@dataclass(frozen=True)
class CircaTrace:
    """Per-stage record of a construction run."""

    stage1_deltas: list
    stage2_deltas: list
    h_max: int  # height after stage 1, the tallest the tree ever gets
    final_entropy: float

    def to_json(self) -> dict:
        return {
            "stage1_deltas": list(self.stage1_deltas),
            "stage2_deltas": list(self.stage2_deltas),
            "h_max": self.h_max,
            "final_entropy": self.final_entropy,
        }


def _apply_schedule(t: CodingTree, sched: MergeSchedule) -> None:
    """Replay a merge schedule onto a fresh star tree in bulk.

    Scheduler ids map to tree ids directly for leaves; merged scheduler node
    n+i becomes tree node n+1+i (the tree root already owns id n). The root's
    child list is rebuilt once at the end instead of per merge.
    """
    g = t.graph
    n = g.n
    root = t.root
    live = set(range(n))
    for l, r, c in zip(sched.left.tolist(), sched.right.tolist(), sched.cut.tolist()):
        li = l if l < n else l + 1
        ri = r if r < n else r + 1
        nl = t.nodes[li]
        nr = t.nodes[ri]
        eid = t._next_id
        t._next_id += 1
        kids = [li, ri] if nl.min_leaf < nr.min_leaf else [ri, li]
        t.nodes[eid] = TreeNode(
            parent=root,
            children=kids,
            height=max(nl.height, nr.height) + 1,
            volume=nl.volume + nr.volume,
            out_degree=nl.out_degree + nr.out_degree - 2 * c,
            min_leaf=min(nl.min_leaf, nr.min_leaf),
            max_leaf=max(nl.max_leaf, nr.max_leaf),
        )
        nl.parent = eid
        nr.parent = eid
        live.discard(li)
        live.discard(ri)
        live.add(eid)
    kids = sorted(live, key=lambda nid: t.nodes[nid].min_leaf)
    rn = t.nodes[root]
    rn.children = kids
    rn.height = 1 + max(t.nodes[c].height for c in kids)


def _squeeze_to_height(g: Graph, t: CodingTree, k: int) -> list:
    """Stage 2: delete cheapest internal nodes until height <= k."""
    deltas: list = []
    if t.height <= k:
        return deltas
    version: dict = {}
    heap: list = []

    def push(v):
        node = t.nodes[v]
        if node.parent is None or node.is_leaf:
            return
        ver = version.get(v, 0)
        heapq.heappush(
            heap, (delete_delta(g, t, v), node.min_leaf, node.max_leaf, v, ver)
        )

    for v in t.nodes:
        push(v)
    while t.height > k:
        if not heap:
            raise RuntimeError("no deletable node left while tree is too tall")
        d, _, _, v, ver = heapq.heappop(heap)
        node = t.nodes.get(v)
        if node is None or ver != version.get(v, 0):
            continue
        pid = node.parent
        kids = list(node.children)
        deltas.append(d)
        t.delete(v)
        version[v] = version.get(v, 0) + 1
        if pid != t.root:
            version[pid] = version.get(pid, 0) + 1
            push(pid)
        for c in kids:
            if not t.nodes[c].is_leaf:
                version[c] = version.get(c, 0) + 1
                push(c)
    return deltas


def _align(t: CodingTree) -> None:
    """Stage 3a: interpose pass-through nodes until every parent gap is 1."""
    order = sorted(
        (nid for nid, node in t.nodes.items() if node.parent is not None),
        key=lambda nid: (t.nodes[nid].min_leaf, nid),
    )
    for v in order:
        while t.nodes[t.nodes[v].parent].height - t.nodes[v].height > 1:
            v = t.shift(v)


def _pad_to_height(t: CodingTree, k: int) -> None:
    """Stage 3b: push whole levels down until the tree is exactly k tall."""
    while t.height < k:
        for v in list(t.nodes[t.root].children):
            t.shift(v)


def circa(g: Graph, k: int):
    """Greedy minimum-entropy coding tree of height exactly ``k``.

    Returns (tree, trace). Requires at least one edge; k >= 1.
    """
    if k < 1:
        raise ValueError("tree height bound must be at least 1")
    if g.n == 0:
        raise ValueError("cannot build a coding tree on an empty graph")
    if g.volume == 0:
        raise ValueError("structural entropy is undefined for an edgeless graph")
    t = star_tree(g)
    sched = merge_schedule(g)
    _apply_schedule(t, sched)
    h_max = t.height
    stage2 = _squeeze_to_height(g, t, k)
    _align(t)
    _pad_to_height(t, k)
    total = structural_entropy(g, t).total
    trace = CircaTrace(
        stage1_deltas=sched.delta.tolist(),
        stage2_deltas=stage2,
        h_max=h_max,
        final_entropy=total,
    )
    return t, trace


def random_tree(g: Graph, k: int, seed: int) -> CodingTree:
    """Random feasible coding tree of height exactly ``k``.

    Repeatedly shuffles the current frontier with a seeded generator and
    merges adjacent pairs (an odd node passes through), k-1 rounds in total,
    then applies the same alignment and padding as the greedy builder. Same
    seed, same tree, bit for bit.
    """
    if k < 1:
        raise ValueError("tree height bound must be at least 1")
    if g.n == 0:
        raise ValueError("cannot build a coding tree on an empty graph")
    rng = np.random.default_rng(seed)
    t = star_tree(g)
    frontier = list(range(g.n))
    for _ in range(k - 1):
        if len(frontier) < 2:
            break
        perm = rng.permutation(len(frontier))
        shuffled = [frontier[i] for i in perm]
        nxt = []
        for i in range(0, len(shuffled) - 1, 2):
            nxt.append(t.merge(shuffled[i], shuffled[i + 1]))
        if len(shuffled) % 2:
            nxt.append(shuffled[-1])
        frontier = nxt
    _align(t)
    _pad_to_height(t, k)
    return t
