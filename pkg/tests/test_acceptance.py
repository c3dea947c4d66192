"""Acceptance criteria AC1-AC8.  Each test prints one PASS/FAIL line."""

import itertools
import random
import time

import pytest

from sumcast.code import SRC, CodeAssignment
from sumcast.codegen import (
    assign_3s_3t,
    assign_greedy_2s,
    assign_ns_2t,
    extract_one_path_subgraph,
)
from sumcast.decompose import decompose
from sumcast.errors import RetriesExhausted
from sumcast.ff import field_make, in_span
from sumcast.instances import (
    STRATA,
    demo_network,
    random_2s,
    random_3s3t,
    random_dag,
    random_ns_2t,
    stratified_suite,
    two_color_fixture,
)
from sumcast.netgraph import SOURCE, flow_table, max_flow, path_count
from sumcast.transform import check_reduction, lift_code, reduce_degrees
from sumcast.verify import (
    binomial_lower_quantile,
    check_sum_decodable,
    evaluate,
    exhaustive_code_search,
    propagate,
    schwartz_zippel_bound,
    sum_functionality_oracle,
    vector_2s2t_oracle,
)


@pytest.fixture
def verdict(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{name} {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def test_ac1_two_sources(verdict):
    t0 = time.perf_counter()
    passed = 0
    binary = True
    for seed in range(200):
        net = random_2s(seed)
        assert len(net.nodes) <= 40 and 2 <= net.n_terminals <= 4
        assert min(flow_table(net).values()) >= 1
        code = assign_greedy_2s(net)
        passed += check_sum_decodable(net, code).ok
        binary &= all(x in (0, 1) for v in propagate(net, code).values() for x in v)
    dt = time.perf_counter() - t0
    verdict("AC1", passed == 200 and binary and dt < 5, f"{passed}/200 decodable, binary={binary}, {dt:.2f}s")


def test_ac2_two_terminals(verdict):
    t0 = time.perf_counter()
    passed = 0
    for seed in range(100):
        net = random_ns_2t(seed)
        n = net.n_sources
        assert 3 <= n <= 5 and min(flow_table(net).values()) >= 1
        sub = extract_one_path_subgraph(net)
        counts = sub.path_counts()
        ok = len(counts) == 2 * n and set(counts.values()) == {1}
        ok &= all(sub.essential_edges().values())
        ok &= check_sum_decodable(net, assign_ns_2t(net)).ok
        passed += ok
    dt = time.perf_counter() - t0
    verdict("AC2", passed == 100 and dt < 10, f"{passed}/100, {dt:.2f}s")


def test_ac3_three_by_three(verdict):
    t0 = time.perf_counter()
    passed = 0
    branches, aux_seqs, color_counts = set(), set(), set()
    for stratum, net in stratified_suite(100):
        assert net.is_structured()
        assert min(flow_table(net, "vertex").values()) >= 2
        code = assign_3s_3t(net)
        want_field = "gf2m:8" if stratum.endswith("random") else "prime:3"
        ok = code.meta["branch"] == stratum and code.field.spec == want_field
        ok &= check_sum_decodable(net, code).ok
        passed += ok
        branches.add(code.meta["branch"])
        d = decompose(net)
        if not d.forbidden:
            color_counts.add(min(len(set(d.colors.values())), 4))
            if d.aux is not None and len(set(d.colors.values())) == 3:
                aux_seqs.add(d.aux.degree_sequence)
    dt = time.perf_counter() - t0
    covered = branches == set(STRATA)
    covered &= color_counts == {0, 1, 2, 3, 4}
    covered &= {(0, 3, 3), (2, 2, 2), (1, 2, 3)} <= aux_seqs
    verdict(
        "AC3",
        passed == 100 and covered and dt < 30,
        f"{passed}/100, {len(branches)} branches, aux {sorted(aux_seqs)}, {dt:.2f}s",
    )


def test_ac4_demo(verdict):
    t0 = time.perf_counter()
    net = demo_network()
    flows = [max_flow(net, s, t) for s in net.sources for t in net.terminals]
    ok = len(flows) == 9 and min(flows) >= 1 and min(flows) < 2
    for spec in ("prime:2", "prime:3", "gf2m:2", "prime:5"):
        F = field_make(spec)
        res = sum_functionality_oracle(F)
        ok &= not res.functional
        x, y = res.collision
        ok &= (F.add(x[0], x[1]), F.add(x[1], x[2])) == (F.add(y[0], y[1]), F.add(y[1], y[2]))
        ok &= F.dot([1, 1, 1], x) != F.dot([1, 1, 1], y)
    search = exhaustive_code_search(net, "prime:2")
    ok &= not search.feasible
    dt = time.perf_counter() - t0
    verdict("AC4", ok and dt < 60, f"flows={flows}, search explored {search.explored}, {dt:.2f}s")


def test_ac5_vector(verdict):
    t0 = time.perf_counter()
    ok = True
    for spec in ("prime:2", "prime:3"):
        res = vector_2s2t_oracle(spec)
        ok &= not res.feasible and res.enumerated == field_make(spec).order ** 16
    relaxed = vector_2s2t_oracle("prime:2", require=("T2",))
    ok &= relaxed.feasible
    dt = time.perf_counter() - t0
    verdict("AC5", ok and dt < 60, f"relaxed satisfying={relaxed.satisfying}, {dt:.2f}s")


def test_ac6_random_bound(verdict):
    net = two_color_fixture()
    wins = 0
    for seed in range(1000):
        try:
            code = assign_3s_3t(net, seed=seed, retries=1)
        except RetriesExhausted:
            continue
        assert code.meta["attempts"] == 1
        assert check_sum_decodable(net, code).ok
        wins += 1
    bound = schwartz_zippel_bound(8, len(net.nodes))
    floor = binomial_lower_quantile(1000, bound, 0.01)
    verdict("AC6", wins >= floor, f"{wins}/1000 vs bound {bound:.4f} (99% floor {floor}), |V|={len(net.nodes)}")


def test_ac7_transform(verdict):
    passed = 0
    for seed in range(50):
        net = random_3s3t(seed) if seed % 2 == 0 else random_2s(seed)
        red = reduce_degrees(net)
        check_reduction(red)
        g = red.reduced
        ok = g.is_structured() and len(g.topo_order) == len(g.nodes)
        ok &= sorted(g.node[s].index for s in g.sources) == sorted(net.node[s].index for s in net.sources)
        ok &= sorted(g.node[t].index for t in g.terminals) == sorted(net.node[t].index for t in net.terminals)
        after = flow_table(g, "vertex")
        ok &= all(after[p] >= min(f, 2) for p, f in flow_table(net).items())
        code = assign_3s_3t(g, seed=seed) if net.n_sources == 3 else assign_greedy_2s(g)
        ok &= check_sum_decodable(g, code).ok
        ok &= check_sum_decodable(net, lift_code(red, code)).ok
        passed += ok
    verdict("AC7", passed == 50, f"{passed}/50")


# -- AC8 independent oracles ---------------------------------------------------


def _enumerate_span(F, rows, n):
    out = set()
    for coeffs in itertools.product(range(F.order), repeat=len(rows)):
        v = [0] * n
        for c, r in zip(coeffs, rows):
            v = [F.add(a, F.mul(c, b)) for a, b in zip(v, r)]
        out.add(tuple(v))
    return out


def _dfs_paths(net, u, v):
    if u == v:
        return 1
    return sum(_dfs_paths(net, net.edge[e].head, v) for e in net.out_edges[u])


def _replay(net, code):
    """Terminal decodes iff its received symbols never fail to pin the sum."""
    F = code.field
    n = net.n_sources
    table = {t: {} for t in net.terminals}
    ok = {t: True for t in net.terminals}
    for x in itertools.product(range(F.order), repeat=n):
        sym = evaluate(net, code, x)
        s = 0
        for xi in x:
            s = F.add(s, xi)
        for t in net.terminals:
            key = tuple(sym[e] for e in net.in_edges[t])
            if table[t].setdefault(key, s) != s:
                ok[t] = False
    return ok


def test_ac8_cross_checks(verdict):
    rng = random.Random(8)
    mismatches = 0
    checks = 0
    for spec in ("prime:2", "prime:3", "gf2m:2", "prime:5", "prime:7", "gf2m:3"):
        F = field_make(spec)
        for _ in range(30):
            n = rng.randint(1, 3)
            rows = [[rng.randrange(F.order) for _ in range(n)] for _ in range(rng.randint(0, 3))]
            span = _enumerate_span(F, rows, n)
            for target in itertools.product(range(F.order), repeat=n):
                checks += 1
                mismatches += (in_span(F, list(target), rows) is not None) != (target in span)
    for _ in range(60):
        net = random_dag(rng, 1, 1, rng.randint(2, 13), rng.uniform(0.2, 0.6))
        assert len(net.nodes) <= 15
        for u in net.topo_order:
            for v in net.topo_order:
                checks += 1
                mismatches += path_count(net, u, v) != _dfs_paths(net, u, v)
    for spec in ("prime:2", "prime:3", "gf2m:2"):
        F = field_make(spec)
        for _ in range(40):
            net = random_dag(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(2, 7), 0.5)
            local = {}
            for e in net.edges:
                m = {f: rng.randrange(F.order) for f in net.in_edges[e.tail]}
                if net.node[e.tail].role == SOURCE:
                    m[SRC] = rng.randrange(F.order)
                local[e.id] = m
            code = CodeAssignment(F, local)
            rep = check_sum_decodable(net, code)
            truth = _replay(net, code)
            for tr in rep.terminals:
                checks += 1
                mismatches += tr.decodable != truth[tr.node]
    verdict("AC8", mismatches == 0, f"{checks} comparisons, {mismatches} mismatches")
