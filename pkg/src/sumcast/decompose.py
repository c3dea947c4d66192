"""Structural decomposition of a 3-source / 3-terminal network.

Every node gets a label (c_s, c_t): how many sources reach it and how many
terminals it reaches.  An edge whose head reaches exactly one terminal t_j
is a t_j-edge; an edge whose head reaches two or more terminals is an
r-edge.  The leaf set of t_j is the set of nodes where t_j's private region
begins.  Nodes labeled (2,2) carry a color: the pair of sources above and
the pair of terminals below.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import DispatchError
from .netgraph import Network, Reach, reach_sets

TERMINAL_EDGE = "terminal"
R_EDGE = "r"
IDLE_EDGE = "idle"  # head reaches no terminal at all


@dataclass(frozen=True, order=True)
class Color:
    sources: tuple[int, int]
    terminals: tuple[int, int]

    def __str__(self) -> str:
        a, b = self.sources
        j, k = self.terminals
        return f"(s{a},s{b},t{j},t{k})"

    def to_json(self) -> dict:
        return {"sources": list(self.sources), "terminals": list(self.terminals)}


@dataclass(frozen=True)
class EdgeClass:
    kind: str  # TERMINAL_EDGE | R_EDGE | IDLE_EDGE
    terminal: int | None = None

    def to_json(self):
        if self.kind == TERMINAL_EDGE:
            return {"class": "terminal", "terminal": self.terminal}
        return {"class": self.kind}


def label_nodes(net: Network, reach: dict[str, Reach] | None = None) -> dict[str, tuple[int, int]]:
    reach = reach or reach_sets(net)
    return {v: (len(r.sources), len(r.terminals)) for v, r in reach.items()}


def classify_edges(net: Network, reach: dict[str, Reach] | None = None) -> dict[int, EdgeClass]:
    reach = reach or reach_sets(net)
    out = {}
    for e in net.edges:
        down = reach[e.head].terminals
        if len(down) == 1:
            out[e.id] = EdgeClass(TERMINAL_EDGE, next(iter(down)))
        elif not down:
            out[e.id] = EdgeClass(IDLE_EDGE)
        else:
            out[e.id] = EdgeClass(R_EDGE)
    return out


def terminal_edges(classes: dict[int, EdgeClass], j: int) -> set[int]:
    return {e for e, c in classes.items() if c.kind == TERMINAL_EDGE and c.terminal == j}


def leaf_sets(net: Network, classes: dict[int, EdgeClass]) -> dict[int, list[str]]:
    """Per terminal index: nodes with an outgoing but no incoming t_j-edge,
    in topological order."""
    out: dict[int, list[str]] = {}
    for t in net.terminals:
        j = net.node[t].index
        tj = terminal_edges(classes, j)
        tails = {net.edge[e].tail for e in tj}
        heads = {net.edge[e].head for e in tj}
        out[j] = sorted(tails - heads, key=net.topo_rank.__getitem__)
    return out


def leaf_on_path(net: Network, path: Sequence[int], classes: dict[int, EdgeClass]) -> str | None:
    """Tail of the first terminal edge on the path (where the path enters
    its terminal's private region)."""
    for e in path:
        if classes[e].kind == TERMINAL_EDGE:
            return net.edge[e].tail
    return None


def forbidden_nodes(labels: dict[str, tuple[int, int]]) -> list[str]:
    return [v for v, lab in labels.items() if lab in ((3, 3), (2, 3), (3, 2))]


def color_nodes(net: Network, reach: dict[str, Reach] | None = None) -> dict[str, Color]:
    """Color of every (2,2) node.  Requires the absence of (3,3), (2,3) and
    (3,2) nodes and checks that no edge joins (2,2) nodes of different color."""
    reach = reach or reach_sets(net)
    labels = label_nodes(net, reach)
    bad = forbidden_nodes(labels)
    if bad:
        raise DispatchError(f"colors need a network without (3,3)/(2,3)/(3,2) nodes; found {bad[:3]}")
    colors = {}
    for v in net.topo_order:
        if labels[v] == (2, 2):
            r = reach[v]
            colors[v] = Color(tuple(sorted(r.sources)), tuple(sorted(r.terminals)))
    for e in net.edges:
        cu, cv = colors.get(e.tail), colors.get(e.head)
        if cu is not None and cv is not None and cu != cv:
            raise DispatchError(f"edge {e.id} joins (2,2) nodes of colors {cu} and {cv}")
    return colors


def distinct_colors(colors: dict[str, Color]) -> list[Color]:
    return sorted(set(colors.values()))


def check_leaf_colors(colors: dict[str, Color], leaves: dict[int, list[str]]) -> None:
    """Every terminal in a color's support has a leaf of that color."""
    for c in distinct_colors(colors):
        for j in c.terminals:
            if not any(colors.get(u) == c for u in leaves.get(j, ())):
                raise DispatchError(f"terminal t{j} has no leaf of color {c}")


@dataclass(frozen=True)
class AuxGraph:
    colors: tuple[Color, ...]
    adjacency: dict[int, tuple[int, ...]]  # terminal index -> indices into colors
    degrees: tuple[int, ...]  # per terminal, by index
    degree_sequence: tuple[int, ...]  # sorted

    def to_json(self) -> dict:
        return {
            "colors": [str(c) for c in self.colors],
            "adjacency": {f"t{j}": [str(self.colors[k]) for k in ks] for j, ks in sorted(self.adjacency.items())},
            "degrees": list(self.degrees),
            "degree_sequence": list(self.degree_sequence),
        }


def build_aux(colors: dict[str, Color], leaves: dict[int, list[str]], n_terminals: int = 3) -> AuxGraph:
    """Bipartite terminal/color incidence: t_j ~ c iff t_j has a leaf of color c."""
    dc = tuple(distinct_colors(colors))
    adj: dict[int, tuple[int, ...]] = {}
    for j in range(1, n_terminals + 1):
        leaf_cols = {colors[u] for u in leaves.get(j, ()) if u in colors}
        adj[j] = tuple(k for k, c in enumerate(dc) if c in leaf_cols)
    for k, c in enumerate(dc):
        deg = sum(1 for ks in adj.values() if k in ks)
        if deg != 2 or any(k in adj[j] for j in range(1, n_terminals + 1) if j not in c.terminals):
            raise DispatchError(f"color {c} has aux degree {deg}, expected its two support terminals")
    degrees = tuple(len(adj[j]) for j in range(1, n_terminals + 1))
    return AuxGraph(dc, adj, degrees, tuple(sorted(degrees)))


def canonical_two_color_relabel(c1: Color, c2: Color) -> tuple[dict[int, int], dict[int, int]]:
    """Source/terminal permutations (old index -> new index) bringing two
    colors that differ in both labels to (s1,s2,t1,t2) and (s2,s3,t2,t3)."""
    shared_s = set(c1.sources) & set(c2.sources)
    shared_t = set(c1.terminals) & set(c2.terminals)
    if len(shared_s) != 1 or len(shared_t) != 1:
        raise DispatchError(f"colors {c1} and {c2} do not share exactly one source and one terminal")
    (ms,), (mt,) = shared_s, shared_t
    (p1,) = set(c1.sources) - shared_s
    (p3,) = set(c2.sources) - shared_s
    (q1,) = set(c1.terminals) - shared_t
    (q3,) = set(c2.terminals) - shared_t
    return {p1: 1, ms: 2, p3: 3}, {q1: 1, mt: 2, q3: 3}


@dataclass
class DecompositionReport:
    labels: dict[str, tuple[int, int]]
    classes: dict[int, EdgeClass]
    leaves: dict[int, list[str]]
    colors: dict[str, Color] = field(default_factory=dict)
    aux: AuxGraph | None = None
    forbidden: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "labels": {v: list(lab) for v, lab in self.labels.items()},
            "edges": {str(e): c.to_json() for e, c in sorted(self.classes.items())},
            "leaf_sets": {f"t{j}": ls for j, ls in sorted(self.leaves.items())},
        }
        if self.forbidden:
            out["case3"] = False
            out["blocking_nodes"] = {v: list(self.labels[v]) for v in self.forbidden}
        else:
            out["case3"] = True
            out["colors"] = {v: str(c) for v, c in self.colors.items()}
            out["distinct_colors"] = [str(c) for c in distinct_colors(self.colors)]
            if self.aux is not None:
                out["aux"] = self.aux.to_json()
        return out


def check_edge_order(net: Network, classes: dict[int, EdgeClass]) -> None:
    """No path leads from a terminal edge to an r-edge, and each t_j-edge
    continues only into t_j-edges."""
    for e in net.edges:
        c = classes[e.id]
        if c.kind != TERMINAL_EDGE:
            continue
        for f in net.out_edges[e.head]:
            cf = classes[f]
            if cf.kind == R_EDGE or (cf.kind == TERMINAL_EDGE and cf.terminal != c.terminal):
                raise AssertionError(f"edge {f} follows t{c.terminal}-edge {e.id} but is {cf}")


def decompose(net: Network) -> DecompositionReport:
    reach = reach_sets(net)
    labels = label_nodes(net, reach)
    classes = classify_edges(net, reach)
    check_edge_order(net, classes)
    leaves = leaf_sets(net, classes)
    bad = forbidden_nodes(labels)
    report = DecompositionReport(labels, classes, leaves, forbidden=bad)
    if not bad:
        report.colors = color_nodes(net, reach)
        check_leaf_colors(report.colors, leaves)
        report.aux = build_aux(report.colors, leaves, net.n_terminals)
    return report
