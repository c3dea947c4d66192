"""Building blocks shared by the code generators: tree extraction inside path
unions, tree summation codes, the support-based greedy engine, and the
per-terminal routing of leaf values."""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from ..code import SRC, InputRef
from ..errors import CodeError
from ..ff import Field, in_span
from ..netgraph import Network, path_nodes, shortest_path

Local = dict[int, dict[InputRef, int]]


def path_or_fail(net: Network, s: str, t: str, allowed: set[int] | None = None) -> list[int]:
    p = shortest_path(net, s, t, allowed)
    if p is None:
        raise CodeError(f"no path from {s} to {t}")
    return p


def in_tree(net: Network, edges: set[int], root: str) -> set[int]:
    """Tree directed into ``root`` inside a union of paths ending at root:
    every other node keeps its lowest-id outgoing edge of the union."""
    tails = {net.edge[e].tail for e in edges} - {root}
    return {min(e for e in net.out_edges[x] if e in edges) for x in tails}


def out_tree(net: Network, edges: set[int], root: str) -> set[int]:
    """Tree directed away from ``root`` inside a union of paths starting at
    root: every other node keeps its lowest-id incoming edge of the union."""
    heads = {net.edge[e].head for e in edges} - {root}
    return {min(e for e in net.in_edges[x] if e in edges) for x in heads}


def tree_path(net: Network, tree: set[int], start: str, root: str) -> list[int]:
    """The unique path from ``start`` to ``root`` in an in-tree."""
    path = []
    v = start
    while v != root:
        e = next(e for e in net.out_edges[v] if e in tree)
        path.append(e)
        v = net.edge[e].head
    return path


def sum_code(net: Network, edges: set[int], feed: dict[str, dict[InputRef, int]] | None = None) -> Local:
    """Each edge of ``edges`` carries the sum of the tail's incoming edges in
    ``edges`` plus whatever ``feed`` injects at the tail."""
    feed = feed or {}
    local: Local = {}
    for e in sorted(edges):
        x = net.edge[e].tail
        coeffs: dict[InputRef, int] = {i: 1 for i in net.in_edges[x] if i in edges}
        coeffs.update(feed.get(x, {}))
        local[e] = coeffs
    return local


def nodes_of(net: Network, edges: Iterable[int]) -> set[str]:
    out = set()
    for e in edges:
        out.add(net.edge[e].tail)
        out.add(net.edge[e].head)
    return out


def path_node_set(net: Network, path: Sequence[int]) -> set[str]:
    return set(path_nodes(net, path))


# ---------------------------------------------------------------------------
# greedy engine


def _cover(avail: list[tuple[frozenset, dict]], union: frozenset) -> list[tuple[frozenset, dict]]:
    """Inputs with pairwise disjoint supports whose union is ``union``."""
    for size in range(1, len(avail) + 1):
        for combo in itertools.combinations(avail, size):
            sets = [s for s, _ in combo]
            if sum(len(s) for s in sets) == len(union) and frozenset().union(*sets) == union:
                return list(combo)
    raise CodeError(f"greedy support {sorted(union)} cannot be realized linearly")


def greedy_code(
    net: Network,
    active: set[int],
    origins: dict[str, list[tuple[int, dict[InputRef, int]]]],
) -> tuple[Local, dict[int, frozenset]]:
    """Greedy encoding on the ``active`` edges.

    Each edge carries the sum of a set of payloads (its support); the
    support of an edge is the union of the supports available at its tail,
    realized by adding inputs whose supports are disjoint.  ``origins`` maps
    a node to the payloads it injects, each with the local combination that
    produces it there.
    """
    support: dict[int, frozenset] = {}
    local: Local = {}
    for e in net.edges_topo:
        if e not in active:
            continue
        x = net.edge[e].tail
        avail = [(frozenset({k}), real) for k, real in origins.get(x, [])]
        avail += [(support[i], {i: 1}) for i in net.in_edges[x] if i in active and support.get(i)]
        union = frozenset().union(*(s for s, _ in avail)) if avail else frozenset()
        coeffs: dict[InputRef, int] = {}
        if union:
            for _, real in _cover(avail, union):
                coeffs.update(real)
        local[e] = coeffs
        support[e] = union
    return local, support


# ---------------------------------------------------------------------------
# terminal-private routing


def route_to_terminal(
    net: Network,
    F: Field,
    region: set[int],
    terminal: str,
    leaves: Sequence[str],
    leaf_values: dict[str, tuple[list[int], dict[InputRef, int]]],
) -> Local | None:
    """Deliver the sum of all sources to ``terminal`` through its private
    edges ``region``.

    ``leaf_values[u]`` is (vector, realization): the source-space vector the
    leaf can form and the local combination of its inputs that forms it.
    Solves for weights of the leaf vectors giving the all-ones vector, then
    sums the weighted values along an in-tree of the region.  Returns None
    when the leaves cannot span the sum.
    """
    n = net.n_sources
    usable = [u for u in leaves if u in leaf_values and any(leaf_values[u][0])]
    lam = in_span(F, [1] * n, [leaf_values[u][0] for u in usable])
    if lam is None:
        return None
    weight = dict(zip(usable, lam))
    tree = in_tree(net, region, terminal)
    leaf_set = set(leaves)
    local: Local = {}
    for e in sorted(tree):
        x = net.edge[e].tail
        if x in leaf_set:
            w = weight.get(x, 0)
            coeffs = {r: F.mul(w, c) for r, c in leaf_values[x][1].items()} if w else {}
            local[e] = {r: c for r, c in coeffs.items() if c}
        else:
            local[e] = {i: 1 for i in net.in_edges[x] if i in tree}
    return local
