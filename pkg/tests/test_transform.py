import pytest

from sumcast.codegen import assign_3s_3t, assign_greedy_2s, plan_3s3t
from sumcast.errors import PreconditionError
from sumcast.instances import random_2s, random_3s3t
from sumcast.netgraph import INTERNAL, SOURCE, TERMINAL, Edge, Network, Node, flow_table, reachable_from
from sumcast.transform import check_reduction, lift_code, reduce_degrees
from sumcast.verify import check_sum_decodable


def star(n_sources, n_terminals, copies=1):
    nodes = [Node(f"s{i}", SOURCE, i) for i in range(1, n_sources + 1)]
    nodes += [Node("v", INTERNAL)]
    nodes += [Node(f"t{j}", TERMINAL, j) for j in range(1, n_terminals + 1)]
    pairs = [(f"s{i}", "v") for i in range(1, n_sources + 1) for _ in range(copies)]
    pairs += [("v", f"t{j}") for j in range(1, n_terminals + 1) for _ in range(copies)]
    return Network(tuple(nodes), tuple(Edge(k, t, h) for k, (t, h) in enumerate(pairs)))


def test_light_network_is_unchanged():
    net = star(1, 2)
    red = reduce_degrees(net)
    assert red.is_identity and red.reduced is net
    assert red.edge_map == {e.id: e.id for e in net.edges}


def test_gadget_connects_every_in_out_pair():
    net = star(3, 3)
    red = reduce_degrees(net)
    g = red.reduced
    assert set(red.gadget_map) == {"v"}
    assert g.is_structured()
    inside = set(red.gadget_map["v"])
    gadget_edges = set(red.gadget_edges("v"))
    for ein in net.in_edges["v"]:
        entry = g.edge[red.edge_map[ein]].head
        assert entry in inside
        down = reachable_from(g, [entry], gadget_edges)
        for eout in net.out_edges["v"]:
            assert g.edge[red.edge_map[eout]].tail in down


def test_reduction_keeps_edge_ids_and_endpoints():
    net = random_3s3t(5)
    red = reduce_degrees(net)
    for e in net.edges:
        r = red.reduced.edge[red.edge_map[e.id]]
        if e.tail not in red.gadget_map:
            assert r.tail == e.tail
        if e.head not in red.gadget_map:
            assert r.head == e.head


def test_capacity_precondition():
    net = Network(
        (Node("s1", SOURCE, 1), Node("t1", TERMINAL, 1)),
        (Edge(0, "s1", "t1", 2),),
    )
    with pytest.raises(PreconditionError):
        reduce_degrees(net)


def test_invariants_and_flow_correspondence():
    for seed in range(25):
        net = random_3s3t(seed, min_flow=1) if seed % 2 else random_2s(seed)
        red = reduce_degrees(net)
        check_reduction(red)
        g = red.reduced
        assert g.is_structured()
        assert [g.node[s].index for s in g.sources] == [net.node[s].index for s in net.sources]
        assert len(g.topo_order) == len(g.nodes)
        before = flow_table(net, "edge")
        after = flow_table(g, "vertex")
        for pair, f in before.items():
            assert after[pair] >= min(f, 2), (seed, pair)


def test_lift_identity():
    net = star(2, 1)
    red = reduce_degrees(net)
    code = assign_greedy_2s(net)
    lifted = lift_code(red, code)
    assert lifted.local == code.local


def test_lift_greedy_through_gadget():
    net = star(2, 3)
    red = reduce_degrees(net)
    assert not red.is_identity
    code = assign_greedy_2s(red.reduced)
    assert check_sum_decodable(red.reduced, code).ok
    lifted = lift_code(red, code)
    lifted.validate(net)
    assert check_sum_decodable(net, lifted).ok
    assert lifted.meta["lifted"]


def test_lift_on_doubled_star():
    # the gadget routes every source to every terminal separately: no colors
    net = star(3, 3, copies=2)
    red = reduce_degrees(net)
    assert plan_3s3t(red.reduced).branch == "case3/0-colors"
    code = assign_3s_3t(red.reduced)
    lifted = lift_code(red, code)
    assert check_sum_decodable(net, lifted).ok


def test_lift_3s3t_random():
    cases = set()
    for seed in range(12):
        net = random_3s3t(seed)
        red = reduce_degrees(net)
        code = assign_3s_3t(red.reduced)
        cases.add(code.meta["branch"])
        assert check_sum_decodable(red.reduced, code).ok
        assert check_sum_decodable(net, lift_code(red, code)).ok
    assert "case0" in cases
