"""Coding trees: rooted hierarchies whose leaves are the vertices of a graph.

Every tree node carries cached statistics (volume, cut size, height, leaf id
range) that the edit operations keep current, so entropy bookkeeping never
rescans the graph. Node ids are arena-style integers that are never reused;
children lists stay sorted by smallest descendant leaf, which makes tree
serialization deterministic.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass

from .graph import Graph, subset_stats


@dataclass(slots=True)
class TreeNode:
    parent: int | None
    children: list
    height: int
    volume: int
    out_degree: int
    leaf_vertex: int | None = None
    min_leaf: int = 0
    max_leaf: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class ValidationIssue:
    prop: str  # "structure", "i".."iv", or "cache"
    node: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple

    def __bool__(self):
        return self.ok


class CodingTree:
    """Mutable coding tree over a fixed graph.

    Build one with :func:`star_tree` or :meth:`from_json`; edit with
    :meth:`merge`, :meth:`delete`, :meth:`shift`.
    """

    def __init__(self, graph: Graph | None, nodes: dict, root: int, leaf_of: dict):
        self.graph = graph
        self.nodes = nodes
        self.root = root
        self.leaf_of = leaf_of  # graph vertex id -> leaf node id
        self._next_id = max(nodes) + 1 if nodes else 0

    # ------------------------------------------------------------------ basics

    @property
    def height(self) -> int:
        return self.nodes[self.root].height

    def __len__(self):
        return len(self.nodes)

    def _require_graph(self) -> Graph:
        if self.graph is None:
            raise ValueError("tree is not bound to a graph; pass one to from_json")
        return self.graph

    def marker(self, v: int):
        """Set of graph vertices under node ``v`` (its leaf descendants)."""
        node = self.nodes[v]
        if node.is_leaf:
            return {node.leaf_vertex}
        out = set()
        stack = [v]
        while stack:
            cur = self.nodes[stack.pop()]
            if cur.is_leaf:
                out.add(cur.leaf_vertex)
            else:
                stack.extend(cur.children)
        return out

    def cut_between(self, vi: int, vj: int) -> int:
        """Number of graph edges with one endpoint under vi and the other under vj."""
        g = self._require_graph()
        a = self.marker(vi)
        b = self.marker(vj)
        if len(a) > len(b):
            a, b = b, a
        return sum(1 for x in a for y in g.neighbors(x) if y in b)

    def _sorted_key(self, nid: int) -> int:
        return self.nodes[nid].min_leaf

    def _recompute_heights_up(self, start: int | None) -> None:
        nid = start
        while nid is not None:
            node = self.nodes[nid]
            nh = 1 + max(self.nodes[c].height for c in node.children)
            if nh == node.height:
                break
            node.height = nh
            nid = node.parent

    # ------------------------------------------------------------------- edits

    def merge(self, vi: int, vj: int) -> int:
        """Fuse two root children under a new intermediate node; returns its id.

        The new node adopts vi and vj (in min-leaf order) and takes their
        combined volume; its cut drops by twice the edge count between the two
        markers.
        """
        if vi == vj:
            raise ValueError("merge needs two distinct nodes")
        for v in (vi, vj):
            if v not in self.nodes:
                raise KeyError(f"no node {v}")
            if self.nodes[v].parent != self.root:
                raise ValueError(f"node {v} is not a child of the root")
        cut = self.cut_between(vi, vj)
        return self._merge_with_cut(vi, vj, cut)

    def _merge_with_cut(self, vi: int, vj: int, cut: int) -> int:
        root = self.nodes[self.root]
        ni = self.nodes[vi]
        nj = self.nodes[vj]
        eid = self._next_id
        self._next_id += 1
        kids = [vi, vj] if ni.min_leaf < nj.min_leaf else [vj, vi]
        eps = TreeNode(
            parent=self.root,
            children=kids,
            height=max(ni.height, nj.height) + 1,
            volume=ni.volume + nj.volume,
            out_degree=ni.out_degree + nj.out_degree - 2 * cut,
            min_leaf=min(ni.min_leaf, nj.min_leaf),
            max_leaf=max(ni.max_leaf, nj.max_leaf),
        )
        self.nodes[eid] = eps
        root.children.remove(vi)
        root.children.remove(vj)
        bisect.insort(root.children, eid, key=self._sorted_key)
        ni.parent = eid
        nj.parent = eid
        self._recompute_heights_up(self.root)
        return eid

    def delete(self, v: int) -> None:
        """Splice out an internal node, re-attaching its children to its parent."""
        if v == self.root:
            raise ValueError("cannot delete the root")
        node = self.nodes.get(v)
        if node is None:
            raise KeyError(f"no node {v}")
        if node.is_leaf:
            raise ValueError(f"node {v} is a leaf; only internal nodes can be deleted")
        pid = node.parent
        parent = self.nodes[pid]
        parent.children.remove(v)
        merged = sorted(parent.children + node.children, key=self._sorted_key)
        parent.children = merged
        for c in node.children:
            self.nodes[c].parent = pid
        del self.nodes[v]
        self._recompute_heights_up(pid)

    def shift(self, vi: int) -> int:
        """Interpose a copy-node between vi and its parent; returns the new id.

        The new node inherits vi's marker, so every cached statistic except
        height is copied verbatim. Entropy is unchanged by construction.
        """
        node = self.nodes.get(vi)
        if node is None:
            raise KeyError(f"no node {vi}")
        if node.parent is None:
            raise ValueError("cannot shift the root")
        pid = node.parent
        parent = self.nodes[pid]
        eid = self._next_id
        self._next_id += 1
        eps = TreeNode(
            parent=pid,
            children=[vi],
            height=node.height + 1,
            volume=node.volume,
            out_degree=node.out_degree,
            min_leaf=node.min_leaf,
            max_leaf=node.max_leaf,
        )
        self.nodes[eid] = eps
        parent.children[parent.children.index(vi)] = eid
        node.parent = eid
        self._recompute_heights_up(pid)
        return eid

    # ------------------------------------------------------------------ layout

    def levels(self):
        """Node ids per level, 0 = leaves, each level sorted by (min_leaf, id).

        Only defined for level-aligned trees (every parent exactly one height
        above its child); raises ValueError otherwise.
        """
        h = self.height
        out = [[] for _ in range(h + 1)]
        for nid, node in self.nodes.items():
            if node.parent is not None:
                gap = self.nodes[node.parent].height - node.height
                if gap != 1:
                    raise ValueError(
                        f"tree is not level-aligned: node {nid} sits {gap} below its parent"
                    )
            out[node.height].append(nid)
        for level in out:
            level.sort(key=lambda nid: (self.nodes[nid].min_leaf, nid))
        return out

    def copy(self) -> "CodingTree":
        nodes = {
            nid: TreeNode(
                parent=n.parent,
                children=list(n.children),
                height=n.height,
                volume=n.volume,
                out_degree=n.out_degree,
                leaf_vertex=n.leaf_vertex,
                min_leaf=n.min_leaf,
                max_leaf=n.max_leaf,
            )
            for nid, n in self.nodes.items()
        }
        return CodingTree(self.graph, nodes, self.root, dict(self.leaf_of))

    # --------------------------------------------------------------- serialize

    def to_json(self) -> dict:
        nodes = []
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            rec = {
                "id": nid,
                "parent": n.parent,
                "children": list(n.children),
                "height": n.height,
                "volume": n.volume,
                "out_degree": n.out_degree,
            }
            if n.is_leaf:
                rec["leaf_vertex"] = n.leaf_vertex
            nodes.append(rec)
        doc = {"nodes": nodes, "root": self.root}
        if self.graph is not None:
            doc["graph_hash"] = self.graph.graph_hash()
        return doc

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, doc: dict, graph: Graph | None = None) -> "CodingTree":
        """Rebuild a tree from its JSON document.

        If ``graph`` is given, the stored graph hash must match. Leaf id
        ranges are recomputed; deeper semantic checks are validate()'s job.
        """
        try:
            root = int(doc["root"])
            records = doc["nodes"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed tree document: missing {exc}") from None
        if graph is not None and "graph_hash" in doc:
            if doc["graph_hash"] != graph.graph_hash():
                raise ValueError("tree document was built for a different graph")
        nodes: dict = {}
        leaf_of: dict = {}
        for rec in records:
            nid = int(rec["id"])
            if nid in nodes:
                raise ValueError(f"duplicate node id {nid}")
            if len(set(rec["children"])) != len(rec["children"]):
                raise ValueError(f"node {nid} lists a child twice")
            leaf_vertex = rec.get("leaf_vertex")
            nodes[nid] = TreeNode(
                parent=rec["parent"],
                children=list(rec["children"]),
                height=int(rec["height"]),
                volume=int(rec["volume"]),
                out_degree=int(rec["out_degree"]),
                leaf_vertex=None if leaf_vertex is None else int(leaf_vertex),
            )
        if root not in nodes:
            raise ValueError(f"root id {root} not among nodes")
        if nodes[root].parent is not None:
            raise ValueError("root must have a null parent")
        for nid, node in nodes.items():
            for c in node.children:
                if c not in nodes:
                    raise ValueError(f"node {nid} lists unknown child {c}")
                if nodes[c].parent != nid:
                    raise ValueError(f"child {c} does not point back to parent {nid}")
            if node.parent is not None and node.parent not in nodes:
                raise ValueError(f"node {nid} has unknown parent {node.parent}")
            if node.is_leaf:
                if node.leaf_vertex is None:
                    raise ValueError(f"leaf node {nid} is missing leaf_vertex")
                if node.leaf_vertex in leaf_of:
                    raise ValueError(f"vertex {node.leaf_vertex} appears at two leaves")
                leaf_of[node.leaf_vertex] = nid
        # Post-order walk from the root: recompute leaf ranges, normalize child
        # order, and make sure every node is actually part of the tree.
        visited = 0
        stack = [(root, False)]
        while stack:
            nid, expanded = stack.pop()
            node = nodes[nid]
            if not expanded and not node.is_leaf:
                stack.append((nid, True))
                for c in node.children:
                    stack.append((c, False))
                continue
            visited += 1
            if node.is_leaf:
                node.min_leaf = node.max_leaf = node.leaf_vertex
            else:
                node.min_leaf = min(nodes[c].min_leaf for c in node.children)
                node.max_leaf = max(nodes[c].max_leaf for c in node.children)
                node.children.sort(key=lambda c: nodes[c].min_leaf)
        if visited != len(nodes):
            raise ValueError("tree document contains nodes unreachable from the root")
        return cls(graph, nodes, root, leaf_of)


def star_tree(g: Graph) -> CodingTree:
    """Height-1 tree: one root over one leaf per graph vertex."""
    if g.n == 0:
        raise ValueError("cannot build a coding tree on an empty graph")
    nodes: dict = {}
    leaf_of: dict = {}
    for v in range(g.n):
        d = g.degree(v)
        nodes[v] = TreeNode(
            parent=g.n,
            children=[],
            height=0,
            volume=d,
            out_degree=d,
            leaf_vertex=v,
            min_leaf=v,
            max_leaf=v,
        )
        leaf_of[v] = v
    nodes[g.n] = TreeNode(
        parent=None,
        children=list(range(g.n)),
        height=1,
        volume=g.volume,
        out_degree=0,
        min_leaf=0,
        max_leaf=g.n - 1,
    )
    return CodingTree(g, nodes, g.n, leaf_of)


def validate(t: CodingTree, g: Graph) -> ValidationReport:
    """Check tree/graph consistency: the defining properties plus all caches.

    Properties checked per node: (i) non-empty marker, (ii) the root covers
    every vertex, (iii) children markers partition the parent marker,
    (iv) leaves carry exactly one vertex each and cover all vertices once.
    Cached height/volume/out_degree/min_leaf/max_leaf must match recomputation.
    """
    issues = []

    # Structural sanity first: parent/child pointers and reachability.
    if t.root not in t.nodes:
        return ValidationReport(False, (ValidationIssue("structure", None, "root id missing"),))
    if t.nodes[t.root].parent is not None:
        issues.append(ValidationIssue("structure", t.root, "root has a parent"))
    reached = set()
    stack = [t.root]
    while stack:
        nid = stack.pop()
        if nid in reached:
            issues.append(ValidationIssue("structure", nid, "node reached twice"))
            continue
        reached.add(nid)
        node = t.nodes[nid]
        for c in node.children:
            if c not in t.nodes:
                issues.append(ValidationIssue("structure", nid, f"unknown child {c}"))
                continue
            if t.nodes[c].parent != nid:
                issues.append(
                    ValidationIssue("structure", c, f"parent pointer does not match {nid}")
                )
            stack.append(c)
    if reached != set(t.nodes):
        orphans = sorted(set(t.nodes) - reached)
        issues.append(
            ValidationIssue("structure", orphans[0], f"{len(orphans)} nodes unreachable from root")
        )
    if issues:
        return ValidationReport(False, tuple(issues))

    markers = _all_markers(t)

    for nid, mk in markers.items():
        if not mk:
            issues.append(ValidationIssue("i", nid, "empty marker"))

    if markers[t.root] != set(range(g.n)):
        issues.append(
            ValidationIssue("ii", t.root, "root marker does not cover the vertex set")
        )

    for nid, node in t.nodes.items():
        if node.is_leaf:
            continue
        union = set()
        total = 0
        for c in node.children:
            union |= markers[c]
            total += len(markers[c])
        if total != len(union):
            issues.append(ValidationIssue("iii", nid, "children markers overlap"))
        elif union != markers[nid]:
            issues.append(ValidationIssue("iii", nid, "children markers miss part of parent"))

    seen_vertices = {}
    for nid, node in t.nodes.items():
        if node.is_leaf:
            if node.leaf_vertex is None or not (0 <= node.leaf_vertex < g.n):
                issues.append(ValidationIssue("iv", nid, "leaf without a valid vertex"))
            elif node.leaf_vertex in seen_vertices:
                issues.append(
                    ValidationIssue("iv", nid, f"vertex {node.leaf_vertex} at two leaves")
                )
            else:
                seen_vertices[node.leaf_vertex] = nid
    if len(seen_vertices) != g.n:
        issues.append(ValidationIssue("iv", None, "leaves do not cover every vertex"))
    for vtx, nid in seen_vertices.items():
        if t.leaf_of.get(vtx) != nid:
            issues.append(ValidationIssue("iv", nid, f"leaf_of map wrong for vertex {vtx}"))

    # Cached statistics.
    for nid, node in t.nodes.items():
        st = subset_stats(g, markers[nid])
        want_height = 0 if node.is_leaf else 1 + max(t.nodes[c].height for c in node.children)
        if node.height != want_height:
            issues.append(ValidationIssue("cache", nid, f"height {node.height} != {want_height}"))
        if node.volume != st.volume:
            issues.append(ValidationIssue("cache", nid, f"volume {node.volume} != {st.volume}"))
        if node.out_degree != st.cut:
            issues.append(ValidationIssue("cache", nid, f"out_degree {node.out_degree} != {st.cut}"))
        if markers[nid]:
            lo, hi = min(markers[nid]), max(markers[nid])
            if node.min_leaf != lo or node.max_leaf != hi:
                issues.append(ValidationIssue("cache", nid, "min/max leaf cache stale"))

    return ValidationReport(not issues, tuple(issues))


def _all_markers(t: CodingTree) -> dict:
    """Marker sets for every node, via post-order walk (ignores height caches)."""
    markers: dict = {}
    stack = [(t.root, False)]
    while stack:
        nid, expanded = stack.pop()
        node = t.nodes[nid]
        if node.is_leaf:
            markers[nid] = {node.leaf_vertex} if node.leaf_vertex is not None else set()
            continue
        if expanded:
            mk = set()
            for c in node.children:
                mk |= markers[c]
            markers[nid] = mk
        else:
            stack.append((nid, True))
            for c in node.children:
                stack.append((c, False))
    return markers
