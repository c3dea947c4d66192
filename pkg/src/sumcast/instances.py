"""Seeded instance generators: random DAG families, hand-assembled structured
3-source/3-terminal templates (one per dispatch branch), and the two fixed
demo topologies."""

from __future__ import annotations

import json
import random
from importlib import resources

from .netgraph import INTERNAL, SOURCE, TERMINAL, Edge, Network, Node, flow_table, reach_sets

# ---------------------------------------------------------------------------
# random DAGs


def random_dag(
    rng: random.Random,
    n_sources: int,
    n_terminals: int,
    n_internal: int,
    p: float,
    fan: int = 2,
) -> Network:
    """Random DAG: internal nodes in a fixed order with forward edges of
    probability ``p``; each source feeds ``fan`` internal nodes from the
    first half and each terminal hears ``fan`` internal nodes from the
    second half."""
    order = [f"v{k}" for k in range(n_internal)]
    half = max(1, n_internal // 2)
    nodes = [Node(f"s{i}", SOURCE, i) for i in range(1, n_sources + 1)]
    nodes += [Node(v, INTERNAL) for v in order]
    nodes += [Node(f"t{j}", TERMINAL, j) for j in range(1, n_terminals + 1)]
    pairs = []
    for i in range(1, n_sources + 1):
        for v in rng.sample(order[: half + 1], min(fan, half + 1)):
            pairs.append((f"s{i}", v))
    for a in range(n_internal):
        for b in range(a + 1, n_internal):
            if rng.random() < p:
                pairs.append((order[a], order[b]))
    low = max(0, half - 1)
    for j in range(1, n_terminals + 1):
        for v in rng.sample(order[low:], min(fan, n_internal - low)):
            pairs.append((v, f"t{j}"))
    return Network(tuple(nodes), tuple(Edge(k, t, h) for k, (t, h) in enumerate(pairs)))


def _connected(net: Network) -> bool:
    reach = reach_sets(net)
    return all(len(reach[t].sources) == net.n_sources for t in net.terminals)


def random_connected(
    seed: int,
    n_sources: int,
    n_terminals: int,
    max_nodes: int = 40,
    min_flow: int = 1,
) -> Network:
    """Random DAG in which every source reaches every terminal with edge
    max-flow at least ``min_flow``; deterministic in ``seed``."""
    rng = random.Random(seed)
    while True:
        budget = max_nodes - n_sources - n_terminals
        n_int = rng.randint(max(3, budget // 4), max(3, budget))
        p = rng.uniform(1.5, 4.0) / n_int
        net = random_dag(rng, n_sources, n_terminals, n_int, min(p, 0.9), fan=max(2, min_flow))
        if not _connected(net):
            continue
        if min_flow > 1 and min(flow_table(net, "edge").values()) < min_flow:
            continue
        return net


def random_2s(seed: int) -> Network:
    """Two sources, 2-4 terminals, at most 40 nodes."""
    n_t = random.Random(seed).randint(2, 4)
    return random_connected(seed, 2, n_t)


def random_ns_2t(seed: int, n_sources: int | None = None) -> Network:
    """3-5 sources (unless given), two terminals."""
    n = n_sources or random.Random(seed).randint(3, 5)
    return random_connected(seed, n, 2, max_nodes=30)


def random_3s3t(seed: int, min_flow: int = 2) -> Network:
    """Three sources and terminals, edge max-flow >= ``min_flow`` per pair,
    typically with internal nodes of degree above three."""
    rng = random.Random(seed)
    while True:
        n_int = rng.randint(6, 12)
        net = random_dag(rng, 3, 3, n_int, rng.choice([0.3, 0.45, 0.6]), fan=2)
        if min(flow_table(net, "edge").values()) >= min_flow:
            return net


# ---------------------------------------------------------------------------
# structured 3s/3t templates


class _Template:
    """Incremental builder.  Logical source/terminal indices are mapped
    through permutations so the same template yields relabeled copies."""

    def __init__(self, rng: random.Random, permute: bool = True):
        self.rng = rng
        sp = [1, 2, 3]
        tp = [1, 2, 3]
        if permute:
            rng.shuffle(sp)
            rng.shuffle(tp)
        self.sp = dict(zip((1, 2, 3), sp))
        self.tp = dict(zip((1, 2, 3), tp))
        self.internal: list[str] = []
        self.pairs: list[tuple[str, str]] = []
        self.count = 0

    def s(self, i: int) -> str:
        return f"s{self.sp[i]}"

    def t(self, j: int) -> str:
        return f"t{self.tp[j]}"

    def node(self, tag: str) -> str:
        self.count += 1
        name = f"{tag}{self.count}"
        self.internal.append(name)
        return name

    def edge(self, u: str, v: str) -> None:
        self.pairs.append((u, v))

    def butterfly(self, a: int, b: int, j: int, k: int) -> None:
        """A (2,2) region: s_a and s_b merge at w, which splits towards t_j and t_k."""
        p, q, w, z, x, y = (self.node(tag) for tag in "pqwzxy")
        self.edge(self.s(a), p)
        self.edge(self.s(b), q)
        self.edge(p, w)
        self.edge(q, w)
        self.edge(w, z)
        self.edge(z, x)
        self.edge(z, y)
        self.edge(x, self.t(j))
        self.edge(y, self.t(k))

    def relay(self, i: int, j: int) -> None:
        r = self.node("r")
        self.edge(self.s(i), r)
        self.edge(r, self.t(j))

    def hub(self, sources: tuple[int, ...], terminals: tuple[int, ...]) -> None:
        """Binary in-tree of ``sources`` into a node v, then a binary
        out-tree from v to ``terminals``."""
        cur = self.s(sources[0])
        for i in sources[1:]:
            m = self.node("m")
            self.edge(cur, m)
            self.edge(self.s(i), m)
            cur = m
        v = self.node("h")
        self.edge(cur, v)
        cur = v
        for j in terminals[:-1]:
            o = self.node("o")
            self.edge(cur, o)
            self.edge(o, self.t(j))
            cur = o
        self.edge(cur, self.t(terminals[-1]))

    def build(self) -> Network:
        nodes = [Node(f"s{i}", SOURCE, i) for i in (1, 2, 3)]
        nodes += [Node(v, INTERNAL) for v in self.internal]
        nodes += [Node(f"t{j}", TERMINAL, j) for j in (1, 2, 3)]
        return Network(tuple(nodes), tuple(Edge(k, t, h) for k, (t, h) in enumerate(self.pairs)))

    def fill(self) -> Network:
        """Add relays s_i -> r -> t_j until every pair has two
        vertex-disjoint paths."""
        while True:
            net = self.build()
            flows = flow_table(net, "vertex")
            short = [(i, j) for (i, j), f in sorted(flows.items()) if f < 2]
            if not short:
                return net
            inv_s = {v: k for k, v in self.sp.items()}
            inv_t = {v: k for k, v in self.tp.items()}
            for i, j in short:
                self.relay(inv_s[i], inv_t[j])


def _subdivide(net: Network, rng: random.Random, k: int) -> Network:
    """Insert a relay node into ``k`` random edges and shuffle edge ids."""
    edges = [(e.tail, e.head) for e in net.edges]
    nodes = list(net.nodes)
    for n in range(k):
        idx = rng.randrange(len(edges))
        t, h = edges[idx]
        mid = f"d{n}"
        nodes.append(Node(mid, INTERNAL))
        edges[idx] = (t, mid)
        edges.append((mid, h))
    ids = list(range(len(edges)))
    rng.shuffle(ids)
    return Network(tuple(nodes), tuple(Edge(i, t, h) for i, (t, h) in zip(ids, edges)))


# Each stratum lists (source pair, terminal pair) butterflies; relays are
# added afterwards wherever a pair lacks two vertex-disjoint paths.
_COLOR_STRATA: dict[str, list[tuple[tuple[int, int], tuple[int, int]]]] = {
    "case3/0-colors": [],
    "case3/1-color": [((1, 2), (1, 2))],
    "case3/2-colors/same-terminals": [((1, 2), (1, 2)), ((2, 3), (1, 2))],
    "case3/2-colors/same-sources": [((1, 2), (1, 2)), ((1, 2), (2, 3))],
    "case3/2-colors/singleton": [((1, 2), (1, 2)), ((2, 3), (2, 3))],
    "case3/2-colors/random": [((1, 2), (1, 2))] * 2 + [((2, 3), (2, 3))] * 2,
    "case3/3-colors/033": [((1, 2), (1, 2)), ((1, 3), (1, 2)), ((2, 3), (1, 2))],
    "case3/3-colors/222/one-source-pair": [((1, 2), (1, 2)), ((1, 2), (2, 3)), ((1, 2), (1, 3))],
    "case3/3-colors/222/two-source-pairs": [((1, 2), (1, 2)), ((1, 2), (2, 3)), ((1, 3), (1, 3))],
    "case3/3-colors/222/three-source-pairs": [((1, 2), (1, 2)), ((2, 3), (2, 3)), ((1, 3), (1, 3))],
    "case3/3-colors/123": [((1, 2), (1, 2)), ((2, 3), (1, 2)), ((1, 3), (1, 3))],
    "case3/4+-colors/greedy": [((1, 2), (1, 2)), ((2, 3), (1, 2)), ((1, 3), (1, 3)), ((1, 3), (2, 3))],
    "case3/4+-colors/table": [((1, 2), (1, 2)), ((2, 3), (1, 2)), ((1, 3), (1, 3)), ((2, 3), (2, 3))],
}

STRATA: tuple[str, ...] = ("case0", "case1", "case2") + tuple(_COLOR_STRATA)


def structured_3s3t(stratum: str, seed: int, subdivisions: int | None = None) -> Network:
    """Structured 3s/3t network with two vertex-disjoint paths per pair whose
    dispatch lands on ``stratum``; sources and terminals are randomly
    relabeled and edges randomly subdivided."""
    if stratum not in STRATA:
        raise ValueError(f"unknown stratum {stratum!r}")
    rng = random.Random(f"{stratum}/{seed}")
    T = _Template(rng)
    if stratum == "case0":
        for _ in range(2):
            T.hub((1, 2, 3), (1, 2, 3))
    elif stratum == "case1":
        for _ in range(2):
            T.hub((1, 2), (1, 2, 3))
    elif stratum == "case2":
        for _ in range(2):
            T.hub((1, 2, 3), (1, 2))
    else:
        for (a, b), (j, k) in _COLOR_STRATA[stratum]:
            T.butterfly(a, b, j, k)
    net = T.fill()
    k = rng.randint(0, 4) if subdivisions is None else subdivisions
    return _subdivide(net, rng, k) if k else net


def stratified_suite(count: int, start: int = 0) -> list[tuple[str, Network]]:
    """``count`` instances cycling through every stratum."""
    out = []
    for n in range(start, start + count):
        stratum = STRATA[n % len(STRATA)]
        out.append((stratum, structured_3s3t(stratum, n)))
    return out


def two_color_fixture() -> Network:
    """Fixed instance for the randomized two-color construction: colors
    (s1,s2,t1,t2) and (s2,s3,t2,t3), two copies each, no relabeling."""
    T = _Template(random.Random(0), permute=False)
    for (a, b), (j, k) in _COLOR_STRATA["case3/2-colors/random"]:
        T.butterfly(a, b, j, k)
    return T.fill()


# ---------------------------------------------------------------------------
# demo topologies


def _load_data(name: str) -> Network:
    from .netgraph import parse_network

    text = resources.files("sumcast.data").joinpath(name).read_text(encoding="utf-8")
    return parse_network(text)


def demo_network(upgraded: bool = False) -> Network:
    """Three sources and terminals, one path per pair, two shared
    bottlenecks A->A' and B->B'.  With ``upgraded`` an extra edge s2->t3
    is added."""
    return _load_data("demo_upgraded.json" if upgraded else "demo.json")


DEMO_EDGES = [
    ("s1", "A"),
    ("s2", "A"),
    ("A", "A'"),
    ("A'", "t1"),
    ("A'", "t3"),
    ("s2", "B"),
    ("s3", "B"),
    ("B", "B'"),
    ("B'", "t2"),
    ("B'", "t3"),
    ("s3", "t1"),
    ("s1", "t2"),
]


def build_demo(upgraded: bool = False) -> Network:
    """Assemble the demo topology in code (used to generate the data files)."""
    nodes = [Node(f"s{i}", SOURCE, i) for i in (1, 2, 3)]
    nodes += [Node(v, INTERNAL) for v in ("A", "A'", "B", "B'")]
    nodes += [Node(f"t{j}", TERMINAL, j) for j in (1, 2, 3)]
    pairs = DEMO_EDGES + ([("s2", "t3")] if upgraded else [])
    return Network(tuple(nodes), tuple(Edge(k, t, h) for k, (t, h) in enumerate(pairs)))


def dump_demo_data(directory: str) -> None:
    import os

    for name, up in (("demo.json", False), ("demo_upgraded.json", True)):
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write(json.dumps(build_demo(up).to_json(), indent=2, sort_keys=True) + "\n")
