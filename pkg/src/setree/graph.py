"""Undirected graph container plus ingestion of edge lists and taxonomy files.

Vertices are dense integer ids 0..n-1. An optional name table maps string
labels to ids (taxonomy input always has one, edge lists get one from their
tokens). Graphs are simple: no self-loops, parallel edges collapse silently.
"""

from __future__ import annotations

import hashlib
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np


class GraphFormatError(ValueError):
    """An input file violates the edge-list or taxonomy format."""


class TaxonomyWarning(UserWarning):
    """A taxonomy construct that is accepted but worth flagging (multi-parent labels)."""


class Graph:
    """Immutable undirected simple graph.

    Parameters
    ----------
    n : number of vertices.
    edges : iterable of (u, v) pairs with 0 <= u, v < n and u != v.
        Duplicates (in either orientation) collapse to one edge.
    names : optional sequence of n unique string labels, names[i] labels vertex i.
    """

    __slots__ = ("n", "names", "degrees", "_adj", "_eu", "_ev", "_name_to_id", "_hash")

    def __init__(self, n, edges, names=None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        for u, v in edges:
            u = int(u)
            v = int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            if u == v:
                raise ValueError(f"self-loop on vertex {u} is not allowed")
            seen.add((u, v) if u < v else (v, u))
        pairs = sorted(seen)
        self.n = n
        self._eu = np.array([p[0] for p in pairs], dtype=np.int64)
        self._ev = np.array([p[1] for p in pairs], dtype=np.int64)
        deg = np.zeros(n, dtype=np.int64)
        np.add.at(deg, self._eu, 1)
        np.add.at(deg, self._ev, 1)
        self.degrees = deg
        adj = [[] for _ in range(n)]
        for u, v in pairs:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = tuple(tuple(a) for a in adj)
        if names is not None:
            names = tuple(str(x) for x in names)
            if len(names) != n:
                raise ValueError("name table length does not match vertex count")
            if len(set(names)) != n:
                raise ValueError("vertex names must be unique")
        self.names = names
        self._name_to_id = {x: i for i, x in enumerate(names)} if names else None
        self._hash = None

    @property
    def num_edges(self) -> int:
        return int(self._eu.shape[0])

    @property
    def volume(self) -> int:
        """Sum of all vertex degrees (twice the edge count)."""
        return int(self.degrees.sum())

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def neighbors(self, v: int) -> tuple:
        return self._adj[v]

    def edges(self):
        """Edges as (u, v) pairs with u < v, ascending."""
        return list(zip(self._eu.tolist(), self._ev.tolist()))

    def edge_arrays(self):
        """Endpoint arrays (u, v), u < v, as int64 numpy arrays."""
        return self._eu, self._ev

    def id_of(self, name: str) -> int:
        if self._name_to_id is None:
            raise KeyError("graph has no name table")
        return self._name_to_id[name]

    def name_of(self, v: int) -> str:
        if self.names is None:
            raise KeyError("graph has no name table")
        return self.names[v]

    def graph_hash(self) -> str:
        """sha256 over the canonical edge list; identifies the graph in tree files."""
        if self._hash is None:
            h = hashlib.sha256()
            h.update(f"{self.n}:".encode())
            for u, v in zip(self._eu.tolist(), self._ev.tolist()):
                h.update(f"{u},{v};".encode())
            self._hash = h.hexdigest()
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"


@dataclass(frozen=True)
class VertexSubset:
    """A vertex set together with its volume and cut size.

    volume = sum of degrees of members; cut = number of edges with exactly
    one endpoint inside.
    """

    members: frozenset
    volume: int
    cut: int


def subset_stats(g: Graph, s) -> VertexSubset:
    """Volume and cut size of a vertex subset ``s`` of ``g``."""
    members = frozenset(int(v) for v in s)
    for v in members:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range")
    volume = sum(g.degree(v) for v in members)
    cut = 0
    for v in members:
        for u in g.neighbors(v):
            if u not in members:
                cut += 1
    return VertexSubset(members=members, volume=volume, cut=cut)


def from_edge_list(text: str) -> Graph:
    """Parse an edge list: two whitespace-separated vertex tokens per line.

    Lines starting with ``#`` are comments; blank lines are skipped. Tokens
    become vertex names in order of first appearance. Numeric-looking tokens
    are still names ("7" and "07" are different vertices). Duplicate edges
    collapse silently; a self-loop is an error that names the line.
    """
    ids: dict = {}
    order: list = []
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.lstrip().startswith("#"):
            continue
        tokens = raw.split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise GraphFormatError(
                f"line {lineno}: expected two vertex tokens, found {len(tokens)}"
            )
        a, b = tokens
        if a == b:
            raise GraphFormatError(f"line {lineno}: self-loop on {a!r}")
        for tok in (a, b):
            if tok not in ids:
                ids[tok] = len(order)
                order.append(tok)
        edges.append((ids[a], ids[b]))
    return Graph(len(order), edges, names=order)


def _parse_taxonomy(text: str):
    """Shared taxonomy parser. Returns (order, directed edges, multi-parent names)."""
    ids: dict = {}
    order: list = []
    directed: list = []
    seen_directed = set()
    parents: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.lstrip().startswith("#"):
            continue
        tokens = raw.split()
        if not tokens:
            continue
        if len(tokens) < 2:
            raise GraphFormatError(
                f"line {lineno}: taxonomy line needs a parent and at least one child"
            )
        for tok in tokens:
            if tok not in ids:
                ids[tok] = len(order)
                order.append(tok)
        p = ids[tokens[0]]
        for tok in tokens[1:]:
            if tok == tokens[0]:
                raise GraphFormatError(f"line {lineno}: {tok!r} listed as its own parent")
            c = ids[tok]
            if (p, c) not in seen_directed:
                seen_directed.add((p, c))
                directed.append((p, c))
                parents.setdefault(c, set()).add(p)

    # Cycle detection on the directed parent->child relation (Kahn's algorithm).
    indeg = [0] * len(order)
    out = [[] for _ in range(len(order))]
    for p, c in directed:
        indeg[c] += 1
        out[p].append(c)
    queue = deque(i for i in range(len(order)) if indeg[i] == 0)
    done = 0
    while queue:
        v = queue.popleft()
        done += 1
        for c in out[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if done != len(order):
        stuck = [order[i] for i in range(len(order)) if indeg[i] > 0]
        raise GraphFormatError(
            "taxonomy contains a cycle involving: " + ", ".join(sorted(stuck)[:5])
        )

    multi = tuple(order[c] for c in sorted(parents) if len(parents[c]) > 1)
    return order, directed, multi


def from_taxonomy(text: str) -> Graph:
    """Parse a taxonomy file into an undirected label graph.

    Each non-comment line lists a parent label followed by its children. The
    first token of the first line is the hierarchy root. Direction is
    discarded in the resulting graph. A label with several parents is kept
    (extra undirected edges) but triggers a ``TaxonomyWarning``; a directed
    cycle is an error.
    """
    order, directed, multi = _parse_taxonomy(text)
    if multi:
        warnings.warn(
            "labels with multiple parents: " + ", ".join(multi), TaxonomyWarning,
            stacklevel=2,
        )
    undirected = {(min(p, c), max(p, c)) for p, c in directed}
    return Graph(len(order), sorted(undirected), names=order)


@dataclass(frozen=True)
class TaxonomyInfo:
    """Shape summary of a taxonomy file (before direction is discarded)."""

    root: str
    n_vertices: int
    n_labels: int  # vertices other than the root token
    n_edges: int
    depth: int  # longest parent-chain distance from the root
    multi_parent: tuple


def taxonomy_stats(text: str) -> TaxonomyInfo:
    """Parse a taxonomy file and report root, sizes, and hierarchy depth."""
    order, directed, multi = _parse_taxonomy(text)
    if not order:
        raise GraphFormatError("taxonomy file has no labels")
    out = [[] for _ in range(len(order))]
    for p, c in directed:
        out[p].append(c)
    depth = 0
    dist = {0: 0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for c in out[v]:
            if c not in dist:
                dist[c] = dist[v] + 1
                depth = max(depth, dist[c])
                queue.append(c)
    undirected = {(min(p, c), max(p, c)) for p, c in directed}
    return TaxonomyInfo(
        root=order[0],
        n_vertices=len(order),
        n_labels=len(order) - 1,
        n_edges=len(undirected),
        depth=depth,
        multi_parent=multi,
    )
