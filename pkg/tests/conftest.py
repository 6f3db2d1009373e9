import random

import pytest

from setree import Graph, from_edge_list, star_tree

K3_TEXT = "a b\na c\nb c\n"
P3_TEXT = "a b\nb c\n"
K2_TEXT = "a b\n"


@pytest.fixture
def k3():
    return from_edge_list(K3_TEXT)


@pytest.fixture
def p3():
    return from_edge_list(P3_TEXT)


@pytest.fixture
def k2():
    return from_edge_list(K2_TEXT)


def er_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
    ]
    return Graph(n, edges)


def er_graph_with_edges(rng: random.Random, n: int, p: float) -> Graph:
    """ER graph, resampled until it has at least one edge."""
    while True:
        g = er_graph(rng, n, p)
        if g.num_edges:
            return g


def random_edited_tree(g: Graph, rng: random.Random, ops: int = 12):
    """Star tree mutated by a random mix of valid merge/delete/shift edits."""
    t = star_tree(g)
    for _ in range(ops):
        choice = rng.random()
        root_kids = t.nodes[t.root].children
        internal = [
            nid
            for nid, node in t.nodes.items()
            if node.parent is not None and node.children
        ]
        non_root = [nid for nid in t.nodes if nid != t.root]
        if choice < 0.5 and len(root_kids) >= 2:
            vi, vj = rng.sample(root_kids, 2)
            t.merge(vi, vj)
        elif choice < 0.75 and internal:
            t.delete(rng.choice(internal))
        else:
            t.shift(rng.choice(non_root))
    return t
