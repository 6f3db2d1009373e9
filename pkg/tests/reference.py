"""Definition-literal recomputation used as the oracle in tests.

Nothing here touches cached statistics: markers come from walking the tree's
child lists, degrees and cuts from scanning the raw edge list, and the
entropy is summed term by term with fsum. Deliberately slow and obvious.
"""

import math


def leaf_descendants(tree, nid):
    """Vertex set under a node, by structure walk only."""
    out = set()
    stack = [nid]
    while stack:
        node = tree.nodes[stack.pop()]
        if node.children:
            stack.extend(node.children)
        else:
            out.add(node.leaf_vertex)
    return out


def degree_table(graph):
    deg = [0] * graph.n
    for u, v in graph.edges():
        deg[u] += 1
        deg[v] += 1
    return deg


def volume_and_cut(graph, members, deg=None):
    """Subset volume and boundary-edge count by direct edge scan."""
    if deg is None:
        deg = degree_table(graph)
    vol = sum(deg[v] for v in members)
    cut = 0
    for u, v in graph.edges():
        if (u in members) != (v in members):
            cut += 1
    return vol, cut


def entropy_by_definition(graph, tree):
    """Per-node entropy terms recomputed from scratch, then fsum'd.

    term(node) = -(cut / vol(G)) * log2(vol(node) / vol(parent)), zero when
    the cut or the volume vanishes.
    """
    edges = graph.edges()
    vol_g = 2 * len(edges)
    if vol_g == 0:
        raise ValueError("edgeless graph")
    deg = degree_table(graph)
    terms = []
    for nid, node in tree.nodes.items():
        if node.parent is None:
            continue
        vol_a, g_a = volume_and_cut(graph, leaf_descendants(tree, nid), deg)
        if g_a == 0 or vol_a == 0:
            continue
        vol_p, _ = volume_and_cut(graph, leaf_descendants(tree, node.parent), deg)
        terms.append(-(g_a / vol_g) * math.log2(vol_a / vol_p))
    return math.fsum(terms)
