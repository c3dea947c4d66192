import json
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sumcast.errors import CycleError, InsufficientFlow, NetworkError
from sumcast.instances import build_demo, demo_network, random_dag
from sumcast.netgraph import (
    INTERNAL,
    SOURCE,
    TERMINAL,
    Edge,
    Network,
    Node,
    disjoint_paths,
    flow_table,
    is_contiguous,
    max_flow,
    normalize,
    parse_network,
    path_count,
    path_nodes,
    reach_sets,
)


def make(pairs, n_sources=1, n_terminals=1, internal=(), caps=None):
    nodes = [Node(f"s{i}", SOURCE, i) for i in range(1, n_sources + 1)]
    nodes += [Node(v, INTERNAL) for v in internal]
    nodes += [Node(f"t{j}", TERMINAL, j) for j in range(1, n_terminals + 1)]
    caps = caps or {}
    return Network(tuple(nodes), tuple(Edge(k, t, h, caps.get(k, 1)) for k, (t, h) in enumerate(pairs)))


DIAMOND = make([("s1", "a"), ("s1", "b"), ("a", "t1"), ("b", "t1")], internal=("a", "b"))


def nx_flow(net, s, t, vertex=False):
    g = nx.DiGraph()

    def add(u, v, c):
        if g.has_edge(u, v):
            g[u][v]["capacity"] += c
        else:
            g.add_edge(u, v, capacity=c)

    for e in net.edges:
        u, v = e.tail, e.head
        if vertex:
            if net.node[u].role == INTERNAL:
                u = ("out", u)
            if net.node[v].role == INTERNAL:
                v = ("in", v)
        add(u, v, e.capacity)
    if vertex:
        for n in net.nodes:
            if n.role == INTERNAL:
                add(("in", n.id), ("out", n.id), 1)
    if s not in g or t not in g:
        return 0
    return int(nx.maximum_flow_value(g, s, t))


def test_parse_single_edge():
    net = parse_network(
        '{"nodes":[{"id":"s1","role":"source","index":1},{"id":"t1","role":"terminal","index":1}],'
        '"edges":[{"id":0,"tail":"s1","head":"t1"}]}'
    )
    assert len(net.nodes) == 2 and len(net.edges) == 1
    assert net.edges[0].capacity == 1


def test_parse_rejects_cycle():
    text = {
        "nodes": [{"id": "s1", "role": "source", "index": 1}, {"id": "t1", "role": "terminal", "index": 1}],
        "edges": [{"id": 0, "tail": "s1", "head": "t1"}, {"id": 1, "tail": "t1", "head": "s1"}],
    }
    with pytest.raises(CycleError):
        parse_network(text)


@pytest.mark.parametrize(
    "data",
    [
        {"nodes": []},
        {"nodes": [{"id": "a", "role": "boss"}], "edges": []},
        {"nodes": [{"id": "s", "role": "source"}], "edges": []},
        {"nodes": [{"id": "s", "role": "source", "index": 1}], "edges": [{"id": 0, "tail": "s", "head": "x"}]},
        {
            "nodes": [{"id": "s", "role": "source", "index": 1}, {"id": "t", "role": "terminal", "index": 1}],
            "edges": [{"id": 0, "tail": "s", "head": "t"}, {"id": 0, "tail": "s", "head": "t"}],
        },
        {
            "nodes": [{"id": "s", "role": "source", "index": 1}, {"id": "s", "role": "internal"}],
            "edges": [],
        },
    ],
)
def test_parse_rejects_malformed(data):
    with pytest.raises(NetworkError):
        parse_network(json.dumps(data))


def test_json_roundtrip():
    for net in (DIAMOND, build_demo(), build_demo(True)):
        again = parse_network(net.dumps())
        assert again.to_json() == net.to_json()


def test_demo_data_matches_builder():
    assert demo_network().to_json() == build_demo().to_json()
    assert demo_network(upgraded=True).to_json() == build_demo(True).to_json()
    net = demo_network()
    assert net.n_sources == 3 and net.n_terminals == 3


def test_max_flow_examples():
    line = make([("s1", "v"), ("v", "t1")], internal=("v",))
    assert max_flow(line, "s1", "t1") == 1
    par = make([("s1", "t1"), ("s1", "t1")])
    assert max_flow(par, "s1", "t1") == 2
    assert max_flow(DIAMOND, "s1", "t1") == 2
    assert max_flow(DIAMOND, "s1", "t1", mode="vertex") == 2
    flows = flow_table(demo_network())
    assert len(flows) == 9 and min(flows.values()) >= 1


def test_vertex_flow_bottleneck():
    # two edge-disjoint paths through one internal node
    net = make([("s1", "v"), ("s1", "v"), ("v", "t1"), ("v", "t1")], internal=("v",))
    assert max_flow(net, "s1", "t1") == 2
    assert max_flow(net, "s1", "t1", mode="vertex") == 1


def random_net(seed):
    rng = random.Random(seed)
    return random_dag(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(2, 9), rng.uniform(0.2, 0.7))


def test_max_flow_matches_networkx():
    for seed in range(60):
        net = random_net(seed)
        for s in net.sources:
            for t in net.terminals:
                for mode in ("edge", "vertex"):
                    f = max_flow(net, s, t, mode=mode)
                    assert f == nx_flow(net, s, t, vertex=mode == "vertex"), (seed, s, t, mode)


def test_disjoint_paths_are_disjoint_and_maximal():
    for seed in range(60):
        net = random_net(seed)
        for s in net.sources:
            for t in net.terminals:
                for mode in ("edge", "vertex"):
                    f = max_flow(net, s, t, mode=mode)
                    paths = disjoint_paths(net, s, t, f, mode=mode)
                    assert len(paths) == f
                    seen_edges, seen_nodes = set(), set()
                    for p in paths:
                        assert is_contiguous(net, p)
                        nodes = path_nodes(net, p)
                        assert nodes[0] == s and nodes[-1] == t
                        assert not seen_edges & set(p)
                        seen_edges |= set(p)
                        if mode == "vertex":
                            inner = set(nodes[1:-1])
                            assert not seen_nodes & inner
                            seen_nodes |= inner
                    with pytest.raises(InsufficientFlow):
                        disjoint_paths(net, s, t, f + 1, mode=mode)


def test_diamond_paths():
    for mode in ("edge", "vertex"):
        paths = disjoint_paths(DIAMOND, "s1", "t1", 2, mode)
        assert sorted(map(tuple, paths)) == [(0, 2), (1, 3)]


def dfs_count(net, u, v):
    if u == v:
        return 1
    return sum(dfs_count(net, net.edge[e].head, v) for e in net.out_edges[u])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_path_count_matches_dfs(seed):
    rng = random.Random(seed)
    net = random_dag(rng, 1, 1, rng.randint(2, 11), rng.uniform(0.2, 0.6))
    assert len(net.nodes) <= 15
    for u in net.topo_order:
        for v in net.topo_order:
            if u != v:
                assert path_count(net, u, v) == dfs_count(net, u, v)


def test_path_count_examples():
    assert path_count(DIAMOND, "s1", "t1") == 2
    assert path_count(make([("s1", "t1")]), "s1", "t1") == 1


def test_reach_sets():
    net = demo_network()
    r = reach_sets(net)
    assert r["A"].sources == frozenset({1, 2})
    assert r["A"].terminals == frozenset({1, 3})
    assert r["s1"].sources == frozenset({1})
    iso = make([("s1", "t1")], internal=("x",))
    assert not reach_sets(iso)["x"].sources and not reach_sets(iso)["x"].terminals


def test_normalize_capacity_and_roles():
    net = make([("s1", "t1")], caps={0: 2})
    norm = normalize(net).network
    assert norm.is_normal()
    assert [(e.tail, e.head) for e in norm.edges] == [("s1", "t1"), ("s1", "t1")]
    with pytest.raises(CycleError):
        make([("s1", "v"), ("v", "t1"), ("v", "s1")], internal=("v",))
    feed = make([("x", "s1"), ("s1", "t1")], internal=("x",))
    n2 = normalize(feed)
    src = n2.network.sources[0]
    assert src != "s1" and n2.network.node["s1"].role == INTERNAL
    assert any(e.tail == src and e.head == "s1" for e in n2.network.edges)


def test_normalize_idempotent_and_flow_preserving():
    rng = random.Random(3)
    for seed in range(30):
        net = random_net(seed)
        caps = {e.id: rng.randint(1, 3) for e in net.edges}
        net = Network(net.nodes, tuple(Edge(e.id, e.tail, e.head, caps[e.id]) for e in net.edges))
        norm = normalize(net)
        assert normalize(norm.network).network is norm.network
        for s in net.sources:
            for t in net.terminals:
                s2 = norm.role_moved.get(s, s)
                t2 = norm.role_moved.get(t, t)
                assert max_flow(norm.network, s2, t2) == max_flow(net, s, t)
