"""n sources, two terminals: extract a minimal subgraph with exactly one path
from every source to every terminal, then let every node forward the sum of
its inputs.

The extraction works on the network augmented with a private entry node s_i'
in front of each source and a private exit node t_j' behind each terminal.
It proceeds by induction on the number of sources: solve for the first n-1
sources (the blue subgraph), route the last source to both terminals (red
paths), find where each red path first touches the blue subgraph (u1, u2)
and splice accordingly; when the last source's red path can reach the other
terminal through blue edges, the part feeding that touch point is frozen
and the rest is solved again with an artificial source standing in for it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..code import SRC, CodeAssignment
from ..errors import ExtractionError, PreconditionError
from ..ff import Field, field_make
from ..netgraph import INTERNAL, SOURCE, TERMINAL, Edge, Network, Node, path_count, reachable_from
from .common import sum_code


def augment_virtual(net: Network) -> tuple[Network, dict[str, str], dict[str, str]]:
    """Add s_i' -> s_i and t_j -> t_j'.  Returns the augmented network and the
    maps original source/terminal -> virtual node."""
    taken = {n.id for n in net.nodes}

    def fresh(base):
        name = base + "'"
        while name in taken:
            name += "'"
        taken.add(name)
        return name

    nodes = []
    vsrc, vterm = {}, {}
    for n in net.nodes:
        if n.role == SOURCE:
            v = fresh(n.id)
            vsrc[n.id] = v
            nodes.append(Node(v, SOURCE, n.index))
            nodes.append(Node(n.id, INTERNAL))
        elif n.role == TERMINAL:
            nodes.append(Node(n.id, INTERNAL))
        else:
            nodes.append(n)
    for t in net.terminals:
        v = fresh(t)
        vterm[t] = v
        nodes.append(Node(v, TERMINAL, net.node[t].index))
    nid = max((e.id for e in net.edges), default=-1) + 1
    edges = list(net.edges)
    for s in net.sources:
        edges.append(Edge(nid, vsrc[s], s))
        nid += 1
    for t in net.terminals:
        edges.append(Edge(nid, t, vterm[t]))
        nid += 1
    return Network(tuple(nodes), tuple(edges)), vsrc, vterm


class _Universe:
    """Mutable edge store for the extraction; artificial sources can be added."""

    def __init__(self, net: Network):
        self.tail = {e.id: e.tail for e in net.edges}
        self.head = {e.id: e.head for e in net.edges}
        self.out: dict[str, list[int]] = {v: list(es) for v, es in net.out_edges.items()}
        self.rank = dict(net.topo_rank)
        self.next_id = max(self.tail, default=-1) + 1
        self.n_artificial = 0
        self.trace: list[str] = []

    def add_artificial(self, target: str) -> tuple[str, int]:
        self.n_artificial += 1
        node = f"\x00a{self.n_artificial}"
        eid = self.next_id
        self.next_id += 1
        self.tail[eid], self.head[eid] = node, target
        self.out[node] = [eid]
        self.rank[node] = -self.n_artificial
        return node, eid

    def path(self, s: str, t: str, allowed: set[int]) -> list[int] | None:
        if s == t:
            return []
        prev: dict[str, int] = {}
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self.out.get(u, ()):
                if e not in allowed:
                    continue
                v = self.head[e]
                if v in seen:
                    continue
                seen.add(v)
                prev[v] = e
                if v == t:
                    out = []
                    while v != s:
                        out.append(prev[v])
                        v = self.tail[prev[v]]
                    return out[::-1]
                queue.append(v)
        return None

    def nodes(self, path: list[int], start: str) -> list[str]:
        return [start] + [self.head[e] for e in path]

    def reach_from(self, starts, allowed: set[int]) -> set[str]:
        seen = set(starts)
        stack = list(seen)
        while stack:
            u = stack.pop()
            for e in self.out.get(u, ()):
                if e in allowed and self.head[e] not in seen:
                    seen.add(self.head[e])
                    stack.append(self.head[e])
        return seen

    def reach_to(self, target: str, allowed: set[int]) -> set[str]:
        into: dict[str, list[int]] = {}
        for e in allowed:
            into.setdefault(self.head[e], []).append(e)
        seen = {target}
        stack = [target]
        while stack:
            u = stack.pop()
            for e in into.get(u, ()):
                t = self.tail[e]
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen


def _split_at(U: _Universe, path: list[int], start: str, node: str) -> tuple[list[int], list[int]]:
    """Prefix of ``path`` up to ``node`` and the remaining suffix."""
    v = start
    for k, e in enumerate(path):
        if v == node:
            return path[:k], path[k:]
        v = U.head[e]
    if v == node:
        return path, []
    raise ExtractionError(f"node {node} not on path")


def _last_common(U: _Universe, p1: list[int], p2: list[int], start: str) -> str:
    common = set(U.nodes(p1, start)) & set(U.nodes(p2, start))
    return max(common, key=lambda v: U.rank[v])


def _extract(U: _Universe, sources: list[str], terms: tuple[str, str], allowed: set[int]) -> set[int]:
    t1, t2 = terms
    sn = sources[-1]
    p1 = U.path(sn, t1, allowed)
    p2 = U.path(sn, t2, allowed)
    if p1 is None or p2 is None:
        raise ExtractionError(f"source {sn!r} does not reach both terminals")
    if len(sources) == 1:
        U.trace.append("base")
        u = _last_common(U, p1, p2, sn)
        pre, suf1 = _split_at(U, p1, sn, u)
        _, suf2 = _split_at(U, p2, sn, u)
        return set(pre) | set(suf1) | set(suf2)

    blue = _extract(U, sources[:-1], terms, allowed)
    blue_nodes = {U.tail[e] for e in blue} | {U.head[e] for e in blue}
    n1 = U.nodes(p1, sn)
    n2 = U.nodes(p2, sn)
    u1 = next(v for v in n1 if v in blue_nodes)
    u2 = next(v for v in n2 if v in blue_nodes)

    if U.path(u1, t2, blue) is not None:
        U.trace.append("freeze-u1")
        return _freeze_and_recurse(U, sources, terms, blue, p1, u1)
    if U.path(u2, t1, blue) is not None:
        U.trace.append("freeze-u2")
        return _freeze_and_recurse(U, sources, terms, blue, p2, u2)

    U.trace.append("splice")
    # neither touch point reaches the other terminal through blue edges:
    # route the last source to u1 and u2 over a shared trunk then two branches
    r1, _ = _split_at(U, p1, sn, u1)
    r2, _ = _split_at(U, p2, sn, u2)
    w = _last_common(U, r1, r2, sn)
    trunk, branch1 = _split_at(U, r1, sn, w)
    _, branch2 = _split_at(U, r2, sn, w)
    return blue | set(trunk) | set(branch1) | set(branch2)


def _freeze_and_recurse(
    U: _Universe,
    sources: list[str],
    terms: tuple[str, str],
    blue: set[int],
    red_path: list[int],
    u: str,
) -> set[int]:
    sn = sources[-1]
    red = set(red_path)
    prefix, _ = _split_at(U, red_path, sn, u)
    # keep only red prefix edges that are needed to connect sn to u
    for e in sorted(prefix):
        trial = (blue | red) - {e}
        if U.path(sn, u, trial) is not None:
            red.discard(e)
    g_br = blue | red
    s_u = [s for s in sources if U.path(s, u, g_br) is not None]
    down = U.reach_from(s_u, g_br)
    up = U.reach_to(u, g_br)
    g_u = {e for e in g_br if U.tail[e] in down and U.head[e] in up}
    rest = g_br - g_u
    sa, ea = U.add_artificial(u)
    rest_sources = [s for s in sources if s not in s_u] + [sa]
    sub = _extract(U, rest_sources, terms, rest | {ea})
    return (sub - {ea}) | g_u


@dataclass(frozen=True)
class OnePathSubgraph:
    network: Network  # augmented with virtual entry/exit nodes
    edges: frozenset[int]  # edge ids of the subgraph (augmented ids)
    original_edges: frozenset[int]  # subset that exists in the input network
    virtual_sources: dict[str, str]
    virtual_terminals: dict[str, str]
    trace: tuple[str, ...] = ()

    def path_counts(self) -> dict[tuple[int, int], int]:
        net = self.network
        allowed = set(self.edges)
        out = {}
        for s in net.sources:
            for t in net.terminals:
                out[(net.node[s].index, net.node[t].index)] = path_count(net, s, t, allowed)
        return out

    def essential_edges(self) -> dict[int, bool]:
        """For each edge: does removing it disconnect some source/terminal pair?"""
        net = self.network
        out = {}
        for e in sorted(self.edges):
            allowed = set(self.edges) - {e}
            broken = False
            for s in net.sources:
                reach = reachable_from(net, [s], allowed)
                if any(t not in reach for t in net.terminals):
                    broken = True
                    break
            out[e] = broken
        return out

    def to_json(self) -> dict:
        return {"edges": sorted(self.original_edges), "path_counts": {
            f"s{i}-t{j}": c for (i, j), c in sorted(self.path_counts().items())}}


def extract_one_path_subgraph(net: Network, validate: bool = True) -> OnePathSubgraph:
    if net.n_terminals != 2:
        raise PreconditionError(f"extraction needs 2 terminals, network has {net.n_terminals}")
    if net.n_sources < 1:
        raise PreconditionError("extraction needs at least one source")
    from .greedy import check_unit_connectivity

    check_unit_connectivity(net)
    aug, vsrc, vterm = augment_virtual(net)
    U = _Universe(aug)
    sources = [vsrc[s] for s in net.sources]
    terms = (vterm[net.terminals[0]], vterm[net.terminals[1]])
    edges = _extract(U, sources, terms, {e.id for e in aug.edges})
    orig = frozenset(e for e in edges if e in net.edge)
    sub = OnePathSubgraph(aug, frozenset(edges), orig, vsrc, vterm, tuple(U.trace))
    if validate:
        bad = {k: c for k, c in sub.path_counts().items() if c != 1}
        if bad:
            raise ExtractionError(f"extracted subgraph has path counts {bad}")
        loose = [e for e, ok in sub.essential_edges().items() if not ok]
        if loose:
            raise ExtractionError(f"extracted subgraph is not minimal: edges {loose} are redundant")
    return sub


def assign_ns_2t(net: Network, field: Field | str = "prime:2") -> CodeAssignment:
    """Every node of the one-path subgraph forwards the sum of its inputs."""
    F = field_make(field)
    sub = extract_one_path_subgraph(net)
    edges = set(sub.original_edges)
    feed = {s: {SRC: 1} for s in net.sources}
    local = sum_code(net, edges, feed)
    return CodeAssignment(F, local, {"strategy": "ns2t", "subgraph_edges": len(edges)})
