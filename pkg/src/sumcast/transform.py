"""Reduction to structured networks: every internal node of total degree
above three is replaced by a gadget made of binary fan-out trees (one per
incoming link), inverted binary fan-in trees (one per outgoing link) and a
complete set of cross edges between their leaves.

Every original edge keeps its id in the reduced network (only its endpoints
move onto gadget nodes), so edge maps are the identity on original ids and
new gadget edges are numbered after them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .code import SRC, CodeAssignment
from .errors import CodeError, PreconditionError
from .ff import unit
from .netgraph import INTERNAL, Edge, Network, Node


@dataclass(frozen=True)
class StructuredReduction:
    original: Network
    reduced: Network
    edge_map: dict[int, int]  # original edge id -> reduced edge id
    gadget_map: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def is_identity(self) -> bool:
        return not self.gadget_map

    def gadget_edges(self, v: str) -> list[int]:
        """Reduced edges with both endpoints inside the gadget of v."""
        inside = set(self.gadget_map.get(v, ()))
        return [e.id for e in self.reduced.edges if e.tail in inside and e.head in inside]

    def to_json(self) -> dict:
        return {
            "edge_map": [{"original": k, "reduced": v} for k, v in sorted(self.edge_map.items())],
            "gadgets": {v: list(ns) for v, ns in sorted(self.gadget_map.items())},
        }


class _Builder:
    def __init__(self, net: Network):
        self.taken = {n.id for n in net.nodes}
        self.nodes: list[Node] = []
        self.edges: list[tuple[str, str]] = []

    def node(self, name: str) -> str:
        while name in self.taken:
            name += "_"
        self.taken.add(name)
        self.nodes.append(Node(name, INTERNAL))
        return name

    def edge(self, tail: str, head: str) -> None:
        self.edges.append((tail, head))

    def tree(self, prefix: str, leaves: int, inverted: bool) -> tuple[str, list[str]]:
        """Caterpillar binary tree; returns (root, leaves in order).

        Each spine node has one leaf child and continues the spine in its
        other child; the last spine node has two leaf children.  Edges point
        away from the root, or towards it when ``inverted``.
        """
        root = self.node(prefix)
        if leaves <= 1:
            return root, [root] if leaves == 1 else []
        out: list[str] = []
        spine = root
        for k in range(1, leaves):
            leaf = self.node(f"{prefix}^{k}")
            self._link(spine, leaf, inverted)
            out.append(leaf)
            if k < leaves - 1:
                nxt = self.node(f"{prefix}.{k}")
                self._link(spine, nxt, inverted)
                spine = nxt
        last = self.node(f"{prefix}^{leaves}")
        self._link(spine, last, inverted)
        out.append(last)
        return root, out

    def _link(self, parent: str, child: str, inverted: bool) -> None:
        if inverted:
            self.edge(child, parent)
        else:
            self.edge(parent, child)


def reduce_degrees(net: Network) -> StructuredReduction:
    """Replace each internal node of total degree > 3 by its gadget."""
    if any(e.capacity != 1 for e in net.edges):
        raise PreconditionError("reduce_degrees needs unit capacities; normalize first")
    heavy = [n.id for n in net.nodes if n.role == INTERNAL and net.degree(n.id) > 3]
    if not heavy:
        return StructuredReduction(net, net, {e.id: e.id for e in net.edges}, {})
    b = _Builder(net)
    head_of: dict[int, str] = {}  # original edge -> new head
    tail_of: dict[int, str] = {}
    gadgets: dict[str, tuple[str, ...]] = {}
    heavy_set = set(heavy)
    for n in net.nodes:
        if n.id not in heavy_set:
            b.nodes.append(n)
            continue
        v = n.id
        start = len(b.nodes)
        ins, outs = net.in_edges[v], net.out_edges[v]
        x_leaves = []
        for i, eid in enumerate(ins, 1):
            root, leaves = b.tree(f"{v}#x{i}", len(outs), inverted=False)
            head_of[eid] = root
            x_leaves.append(leaves)
        y_leaves = []
        for j, eid in enumerate(outs, 1):
            root, leaves = b.tree(f"{v}#y{j}", len(ins), inverted=True)
            tail_of[eid] = root
            y_leaves.append(leaves)
        for i in range(len(ins)):
            for j in range(len(outs)):
                b.edge(x_leaves[i][j], y_leaves[j][i])
        gadgets[v] = tuple(x.id for x in b.nodes[start:])
    next_id = max(e.id for e in net.edges) + 1
    edges = [Edge(e.id, tail_of.get(e.id, e.tail), head_of.get(e.id, e.head)) for e in net.edges]
    for k, (t, h) in enumerate(b.edges):
        edges.append(Edge(next_id + k, t, h))
    reduced = Network(tuple(b.nodes), tuple(edges))
    red = StructuredReduction(net, reduced, {e.id: e.id for e in net.edges}, gadgets)
    check_reduction(red)
    return red


def check_reduction(red: StructuredReduction) -> None:
    """Assert the structural invariants of a reduction (degree bound,
    acyclicity by construction of Network, sources/terminals preserved)."""
    g = red.reduced
    for n in g.nodes:
        if n.role == INTERNAL and g.degree(n.id) > 3:
            raise AssertionError(f"reduced node {n.id} has degree {g.degree(n.id)}")
    o = red.original
    if o.sources != g.sources or o.terminals != g.terminals:
        raise AssertionError("sources/terminals not preserved")


def lift_code(red: StructuredReduction, code: CodeAssignment) -> CodeAssignment:
    """Turn a linear code on the reduced network into one on the original.

    For an edge leaving a gadget, its symbol is a linear function of the
    symbols entering the gadget; that function, read off by pushing unit
    vectors through the gadget, is the lifted local encoding.
    """
    if red.is_identity:
        return CodeAssignment(code.field, {e: dict(m) for e, m in code.local.items()}, dict(code.meta))
    F = code.field
    g = red.reduced
    code.validate(g)
    local: dict[int, dict] = {}
    for e in red.original.edges:
        u = e.tail
        if u not in red.gadget_map:
            local[e.id] = dict(code.coeffs(red.edge_map[e.id]))
    for u, members in red.gadget_map.items():
        ins = red.original.in_edges[u]
        width = len(ins)
        lv: dict[int, list[int]] = {red.edge_map[eid]: unit(width, i) for i, eid in enumerate(ins)}
        inside = set(members)
        for eid in g.edges_topo:
            if g.edge[eid].tail not in inside:
                continue
            vec = [0] * width
            for ref, c in code.coeffs(eid).items():
                if ref == SRC:  # pragma: no cover - gadget nodes are internal
                    raise CodeError(f"gadget edge {eid} reads a source symbol")
                vec = F.axpy(c, lv[ref], vec)
            lv[eid] = vec
        for eid in red.original.out_edges[u]:
            vec = lv[red.edge_map[eid]]
            local[eid] = {ins[i]: c for i, c in enumerate(vec) if c}
    meta = dict(code.meta)
    meta["lifted"] = True
    return CodeAssignment(F, local, meta)
