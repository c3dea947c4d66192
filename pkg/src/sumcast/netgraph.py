"""Directed acyclic unit-capacity networks: model, JSON I/O, normalization,
max-flow, disjoint paths, path counting and reachability.

All traversals visit edges in ascending edge-id order so every result is
reproducible.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CycleError, InsufficientFlow, NetworkError

SOURCE = "source"
TERMINAL = "terminal"
INTERNAL = "internal"


@dataclass(frozen=True)
class Node:
    id: str
    role: str = INTERNAL
    index: int | None = None


@dataclass(frozen=True)
class Edge:
    id: int
    tail: str
    head: str
    capacity: int = 1


@dataclass(frozen=True)
class Network:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise NetworkError("duplicate node ids")
        eids = [e.id for e in self.edges]
        if len(set(eids)) != len(eids):
            raise NetworkError("duplicate edge ids")
        known = set(ids)
        for e in self.edges:
            if e.tail not in known or e.head not in known:
                raise NetworkError(f"edge {e.id} has a dangling endpoint")
            if e.capacity < 1:
                raise NetworkError(f"edge {e.id} has capacity {e.capacity}")
        for role in (SOURCE, TERMINAL):
            idx = [n.index for n in self.nodes if n.role == role]
            if any(i is None for i in idx) or sorted(idx) != list(range(1, len(idx) + 1)):
                raise NetworkError(f"{role} indices must be 1..k without gaps")
        self.topo_order  # raises on cycles

    # -- lookups ---------------------------------------------------------

    @cached_property
    def node(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def edge(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {n.id: [] for n in self.nodes}
        for e in sorted(self.edges, key=lambda e: e.id):
            out[e.tail].append(e.id)
        return out

    @cached_property
    def in_edges(self) -> dict[str, list[int]]:
        inc: dict[str, list[int]] = {n.id: [] for n in self.nodes}
        for e in sorted(self.edges, key=lambda e: e.id):
            inc[e.head].append(e.id)
        return inc

    @cached_property
    def sources(self) -> list[str]:
        """Source node ids ordered by source index."""
        return [n.id for n in sorted((n for n in self.nodes if n.role == SOURCE), key=lambda n: n.index)]

    @cached_property
    def terminals(self) -> list[str]:
        return [n.id for n in sorted((n for n in self.nodes if n.role == TERMINAL), key=lambda n: n.index)]

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    @property
    def n_terminals(self) -> int:
        return len(self.terminals)

    def source_index(self, node: str) -> int | None:
        n = self.node[node]
        return n.index if n.role == SOURCE else None

    @cached_property
    def topo_order(self) -> list[str]:
        """Kahn's algorithm; ready nodes are released in declaration order."""
        pos = {n.id: k for k, n in enumerate(self.nodes)}
        indeg = {n.id: 0 for n in self.nodes}
        for e in self.edges:
            indeg[e.head] += 1
        ready = [(pos[v], v) for v, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            _, v = heapq.heappop(ready)
            order.append(v)
            for eid in self.out_edges[v]:
                h = self.edge[eid].head
                indeg[h] -= 1
                if indeg[h] == 0:
                    heapq.heappush(ready, (pos[h], h))
        if len(order) != len(self.nodes):
            stuck = sorted(v for v, d in indeg.items() if d > 0)
            raise CycleError(f"network has a directed cycle through {stuck[:5]}")
        return order

    @cached_property
    def topo_rank(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.topo_order)}

    @cached_property
    def edges_topo(self) -> list[int]:
        """Edge ids sorted by (topological rank of tail, id)."""
        rk = self.topo_rank
        return sorted(self.edge, key=lambda eid: (rk[self.edge[eid].tail], eid))

    def degree(self, v: str) -> int:
        return len(self.in_edges[v]) + len(self.out_edges[v])

    def is_normal(self) -> bool:
        if any(e.capacity != 1 for e in self.edges):
            return False
        if sorted(self.edge) != list(range(len(self.edges))):
            return False
        for s in self.sources:
            if self.in_edges[s]:
                return False
        for t in self.terminals:
            if self.out_edges[t]:
                return False
        return True

    def is_structured(self) -> bool:
        return all(self.degree(n.id) <= 3 for n in self.nodes if n.role == INTERNAL)

    def subnetwork(self, edge_ids: Iterable[int]) -> "Network":
        keep = set(edge_ids)
        return Network(self.nodes, tuple(e for e in self.edges if e.id in keep))

    def with_roles(self, source_perm: dict[int, int], terminal_perm: dict[int, int]) -> "Network":
        """Relabel source/terminal indices: old index k becomes perm[k]."""
        nodes = []
        for n in self.nodes:
            if n.role == SOURCE:
                n = Node(n.id, SOURCE, source_perm[n.index])
            elif n.role == TERMINAL:
                n = Node(n.id, TERMINAL, terminal_perm[n.index])
            nodes.append(n)
        return Network(tuple(nodes), self.edges)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        nodes = []
        for n in self.nodes:
            d = {"id": n.id, "role": n.role}
            if n.index is not None:
                d["index"] = n.index
            nodes.append(d)
        edges = []
        for e in sorted(self.edges, key=lambda e: e.id):
            d = {"id": e.id, "tail": e.tail, "head": e.head}
            if e.capacity != 1:
                d["capacity"] = e.capacity
            edges.append(d)
        return {"nodes": nodes, "edges": edges}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def parse_network(text: str | dict) -> Network:
    """Build a Network from the JSON text (or already-decoded dict)."""
    data = json.loads(text) if isinstance(text, str) else text
    try:
        raw_nodes = data["nodes"]
        raw_edges = data["edges"]
    except (KeyError, TypeError):
        raise NetworkError("network JSON needs 'nodes' and 'edges'") from None
    nodes = []
    for rn in raw_nodes:
        if "id" not in rn:
            raise NetworkError(f"node without id: {rn}")
        role = rn.get("role")
        if role not in (SOURCE, TERMINAL, INTERNAL):
            raise NetworkError(f"node {rn['id']!r} has missing or unknown role {role!r}")
        index = rn.get("index")
        if role != INTERNAL and not isinstance(index, int):
            raise NetworkError(f"{role} {rn['id']!r} needs an integer index")
        nodes.append(Node(str(rn["id"]), role, index if role != INTERNAL else None))
    edges = []
    for re_ in raw_edges:
        try:
            edges.append(Edge(int(re_["id"]), str(re_["tail"]), str(re_["head"]), int(re_.get("capacity", 1))))
        except KeyError as exc:
            raise NetworkError(f"edge missing field {exc}") from None
    return Network(tuple(nodes), tuple(edges))


def load_network(path: str) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# ---------------------------------------------------------------------------
# normalization


@dataclass(frozen=True)
class Normalization:
    network: Network
    edge_origin: dict[int, int | None] = field(default_factory=dict)  # new id -> original id
    role_moved: dict[str, str] = field(default_factory=dict)  # original node -> new role holder

    def original_edges(self, original_id: int) -> list[int]:
        return [k for k, v in self.edge_origin.items() if v == original_id]


def _fresh(taken: set[str], base: str) -> str:
    name = base + "'"
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def normalize(net: Network) -> Normalization:
    """Split capacities into parallel unit edges and give sources (terminals)
    with incoming (outgoing) edges an artificial replacement node.

    The connector edge gets as many parallel copies as the node's total out-
    (in-) capacity so per-pair max-flows are preserved.
    """
    if net.is_normal():
        return Normalization(net, {e.id: e.id for e in net.edges}, {})
    taken = {n.id for n in net.nodes}
    nodes: list[Node] = []
    moved: dict[str, str] = {}
    head_conn: list[tuple[str, str, int | None]] = []
    tail_conn: list[tuple[str, str, int | None]] = []
    for n in net.nodes:
        if n.role == SOURCE and net.in_edges[n.id]:
            new = _fresh(taken, n.id)
            nodes.append(Node(new, SOURCE, n.index))
            nodes.append(Node(n.id, INTERNAL))
            cap = sum(net.edge[e].capacity for e in net.out_edges[n.id])
            head_conn.extend((new, n.id, None) for _ in range(max(cap, 1)))
            moved[n.id] = new
        elif n.role == TERMINAL and net.out_edges[n.id]:
            new = _fresh(taken, n.id)
            nodes.append(Node(n.id, INTERNAL))
            nodes.append(Node(new, TERMINAL, n.index))
            cap = sum(net.edge[e].capacity for e in net.in_edges[n.id])
            tail_conn.extend((n.id, new, None) for _ in range(max(cap, 1)))
            moved[n.id] = new
        else:
            nodes.append(n)
    pending = list(head_conn)
    for e in sorted(net.edges, key=lambda e: e.id):
        pending.extend((e.tail, e.head, e.id) for _ in range(e.capacity))
    pending.extend(tail_conn)
    edges = tuple(Edge(k, t, h) for k, (t, h, _) in enumerate(pending))
    origin = {k: o for k, (_, _, o) in enumerate(pending)}
    return Normalization(Network(tuple(nodes), edges), origin, moved)


# ---------------------------------------------------------------------------
# flows and paths


class _FlowGraph:
    """Residual graph for unit-capacity augmenting-path max-flow.

    Arcs are (tail, head, cap, label); label links a forward arc back to a
    network edge id (or None for node-split arcs).
    """

    def __init__(self):
        self.adj: dict[str, list[int]] = {}
        self.to: list[str] = []
        self.cap: list[int] = []
        self.label: list[int | None] = []

    def add(self, u: str, v: str, cap: int, label: int | None) -> None:
        for x in (u, v):
            self.adj.setdefault(x, [])
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.label.append(label)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)
        self.label.append(None)

    def augment(self, s: str, t: str) -> bool:
        prev: dict[str, int] = {s: -1}
        queue = deque([s])
        while queue and t not in prev:
            u = queue.popleft()
            for a in self.adj.get(u, ()):
                v = self.to[a]
                if self.cap[a] > 0 and v not in prev:
                    prev[v] = a
                    queue.append(v)
        if t not in prev:
            return False
        v = t
        while v != s:
            a = prev[v]
            self.cap[a] -= 1
            self.cap[a ^ 1] += 1
            v = self.to[a ^ 1]
        return True

    def flow(self, s: str, t: str, limit: int | None = None) -> int:
        total = 0
        while (limit is None or total < limit) and self.augment(s, t):
            total += 1
        return total


def _inn(v: str) -> str:
    return f"{v}\x00in"


def _out(v: str) -> str:
    return f"{v}\x00out"


def _build_flow_graph(net: Network, mode: str) -> _FlowGraph:
    g = _FlowGraph()
    split = mode == "vertex"
    if mode not in ("edge", "vertex"):
        raise ValueError(f"mode must be 'edge' or 'vertex', got {mode!r}")

    def tail_of(v):
        return _out(v) if split and net.node[v].role == INTERNAL else v

    def head_of(v):
        return _inn(v) if split and net.node[v].role == INTERNAL else v

    if split:
        for n in net.nodes:
            if n.role == INTERNAL:
                g.add(_inn(n.id), _out(n.id), 1, None)
    for e in sorted(net.edges, key=lambda e: e.id):
        g.add(tail_of(e.tail), head_of(e.head), e.capacity, e.id)
    return g


def max_flow(net: Network, s: str, t: str, mode: str = "edge", limit: int | None = None) -> int:
    """Maximum number of edge- (or internally vertex-) disjoint s->t paths."""
    if s not in net.node or t not in net.node:
        raise NetworkError(f"unknown node {s!r} or {t!r}")
    if s == t:
        raise NetworkError("source and sink coincide")
    return _build_flow_graph(net, mode).flow(s, t, limit)


def disjoint_paths(net: Network, s: str, t: str, k: int, mode: str = "edge") -> list[list[int]]:
    """k pairwise disjoint s->t paths as edge-id lists (flow decomposition)."""
    g = _build_flow_graph(net, mode)
    got = g.flow(s, t, k)
    if got < k:
        raise InsufficientFlow(f"only {got} {mode}-disjoint paths from {s} to {t}, need {k}")
    used = {}
    for a, lab in enumerate(g.label):
        if lab is not None and a % 2 == 0:
            orig = net.edge[lab].capacity
            if g.cap[a] < orig:
                used[lab] = orig - g.cap[a]
    paths = []
    for _ in range(k):
        path = []
        v = s
        while v != t:
            nxt = next(e for e in net.out_edges[v] if used.get(e, 0) > 0)
            used[nxt] -= 1
            path.append(nxt)
            v = net.edge[nxt].head
        paths.append(path)
    return paths


def path_nodes(net: Network, path: Sequence[int]) -> list[str]:
    if not path:
        return []
    return [net.edge[path[0]].tail] + [net.edge[e].head for e in path]


def is_contiguous(net: Network, path: Sequence[int]) -> bool:
    return all(net.edge[a].head == net.edge[b].tail for a, b in zip(path, path[1:]))


def shortest_path(
    net: Network, s: str, t: str, allowed: set[int] | None = None
) -> list[int] | None:
    """BFS path s->t restricted to ``allowed`` edges; lowest ids explored first."""
    if s == t:
        return []
    prev: dict[str, int] = {}
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for eid in net.out_edges[u]:
            if allowed is not None and eid not in allowed:
                continue
            v = net.edge[eid].head
            if v in seen:
                continue
            seen.add(v)
            prev[v] = eid
            if v == t:
                path = []
                while v != s:
                    path.append(prev[v])
                    v = net.edge[prev[v]].tail
                return path[::-1]
            queue.append(v)
    return None


def path_count(net: Network, u: str, v: str, allowed: set[int] | None = None) -> int:
    """Number of distinct u->v paths, by DP over the topological order."""
    count = {u: 1}
    for x in net.topo_order[net.topo_rank[u]:]:
        c = count.get(x, 0)
        if not c:
            continue
        for eid in net.out_edges[x]:
            if allowed is not None and eid not in allowed:
                continue
            h = net.edge[eid].head
            count[h] = count.get(h, 0) + c
    return count.get(v, 0)


def reachable_from(net: Network, starts: Iterable[str], allowed: set[int] | None = None) -> set[str]:
    seen = set(starts)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for eid in net.out_edges[u]:
            if allowed is not None and eid not in allowed:
                continue
            h = net.edge[eid].head
            if h not in seen:
                seen.add(h)
                stack.append(h)
    return seen


def reaching(net: Network, targets: Iterable[str], allowed: set[int] | None = None) -> set[str]:
    seen = set(targets)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for eid in net.in_edges[u]:
            if allowed is not None and eid not in allowed:
                continue
            t = net.edge[eid].tail
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


@dataclass(frozen=True)
class Reach:
    sources: frozenset[int]  # indices of sources upstream (a source reaches itself)
    terminals: frozenset[int]  # indices of terminals downstream


def reach_sets(net: Network) -> dict[str, Reach]:
    """Upstream-source and downstream-terminal index sets for every node."""
    up: dict[str, set[int]] = {}
    for v in net.topo_order:
        s = set()
        if net.node[v].role == SOURCE:
            s.add(net.node[v].index)
        for eid in net.in_edges[v]:
            s |= up[net.edge[eid].tail]
        up[v] = s
    down: dict[str, set[int]] = {}
    for v in reversed(net.topo_order):
        t = set()
        if net.node[v].role == TERMINAL:
            t.add(net.node[v].index)
        for eid in net.out_edges[v]:
            t |= down[net.edge[eid].head]
        down[v] = t
    return {v: Reach(frozenset(up[v]), frozenset(down[v])) for v in net.topo_order}


def flow_table(net: Network, mode: str = "edge") -> dict[tuple[int, int], int]:
    """max-flow for every (source index, terminal index) pair."""
    out = {}
    for s in net.sources:
        for t in net.terminals:
            out[(net.node[s].index, net.node[t].index)] = max_flow(net, s, t, mode)
    return out
