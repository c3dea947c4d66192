"""Three sources, three terminals on structured networks.

The construction looks at the first node (in topological order) whose label
is (3,3), (2,3) or (3,2) and builds trees around it.  When no such node
exists every edge is either private to one terminal or carries information
from at most two sources, and the code is driven by the colors of the (2,2)
nodes: each node with outgoing r-edges is assigned a target vector, and each
terminal combines the values of its leaves inside its private region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..code import SRC, CodeAssignment, InputRef
from ..decompose import (
    R_EDGE,
    Color,
    DecompositionReport,
    canonical_two_color_relabel,
    decompose,
    distinct_colors,
    terminal_edges,
)
from ..errors import DispatchError, FieldError, PreconditionError
from ..ff import Field, field_make, in_span, unit
from ..netgraph import SOURCE, Network, disjoint_paths, max_flow, reach_sets
from ..verify import check_sum_decodable
from .common import Local, greedy_code, in_tree, out_tree, path_node_set, path_or_fail, route_to_terminal, sum_code, tree_path
from . import randomized

DEFAULT_FIELD = "prime:3"
RANDOM_FIELD = "gf2m:8"

# payload vectors per source pair for colors sharing a terminal pair;
# any two of them span the all-ones vector over a field of characteristic > 2
TABLE = {(1, 2): (2, 1, 0), (2, 3): (0, 1, 2), (1, 3): (1, 0, -1)}

GREEDY = "greedy"
TABLE_CODE = "table"
PROPAGATE = "propagate"
RANDOM = "random"


def table_vector(F: Field, sources: tuple[int, int]) -> list[int]:
    if F.characteristic == 2:
        raise FieldError(f"table payloads need characteristic > 2, got {F}")
    return [F.from_int(k) for k in TABLE[tuple(sorted(sources))]]


def check_3s3t(net: Network) -> None:
    if net.n_sources != 3 or net.n_terminals != 3:
        raise PreconditionError(f"need 3 sources and 3 terminals, got {net.n_sources} and {net.n_terminals}")
    if not net.is_structured():
        raise PreconditionError("internal nodes must have total degree at most 3; reduce degrees first")
    for s in net.sources:
        for t in net.terminals:
            if max_flow(net, s, t, mode="vertex", limit=2) < 2:
                pair = (net.node[s].index, net.node[t].index)
                raise PreconditionError(f"fewer than 2 vertex-disjoint paths from {s} to {t}", pair=pair)


@dataclass
class Plan:
    """Which construction applies and, for the color case, how each color
    encodes.  ``strategies`` maps a color to (kind, argument)."""

    case: str
    node: str | None = None
    branch: str = ""
    strategies: dict[Color, tuple[str, int | None]] = field(default_factory=dict)
    decomp: DecompositionReport | None = None

    def to_json(self) -> dict:
        out = {"case": self.case, "branch": self.branch}
        if self.node is not None:
            out["node"] = self.node
        if self.strategies:
            out["colors"] = {
                str(c): kind if arg is None else f"{kind}:s{arg}" for c, (kind, arg) in sorted(self.strategies.items())
            }
        return out


def _color_plan(net: Network, decomp: DecompositionReport) -> tuple[str, dict[Color, tuple[str, int | None]]]:
    cols = distinct_colors(decomp.colors)
    aux = decomp.aux
    k = len(cols)
    if k == 0:
        return "0-colors", {}
    if k == 1:
        return "1-color", {cols[0]: (GREEDY, None)}
    if k == 2:
        c1, c2 = cols
        if c1.terminals == c2.terminals:
            return "2-colors/same-terminals", {c1: (TABLE_CODE, None), c2: (TABLE_CODE, None)}
        if c1.sources == c2.sources:
            return "2-colors/same-sources", {c1: (GREEDY, None), c2: (GREEDY, None)}
        src_perm, term_perm = canonical_two_color_relabel(c1, c2)
        back_s = {new: old for old, new in src_perm.items()}
        back_t = {new: old for old, new in term_perm.items()}
        t2 = net.terminals[back_t[2] - 1]
        labels = decomp.labels
        for private in (1, 3):
            s = net.sources[back_s[private] - 1]
            for p in disjoint_paths(net, s, t2, 2, mode="vertex"):
                u = _leaf_on(net, p, decomp, back_t[2])
                if u is not None and labels[u][0] == 1:
                    return "2-colors/singleton", {c1: (GREEDY, None), c2: (GREEDY, None)}
        return "2-colors/random", {c1: (RANDOM, None), c2: (RANDOM, None)}
    if k == 3:
        seq = aux.degree_sequence
        if seq == (0, 3, 3):
            return "3-colors/033", {c: (GREEDY, None) for c in cols}
        if seq == (2, 2, 2):
            pairs = [c.sources for c in cols]
            distinct = sorted(set(pairs))
            if len(distinct) == 1:
                return "3-colors/222/one-source-pair", {c: (GREEDY, None) for c in cols}
            if len(distinct) == 2:
                rep = next(p for p in distinct if pairs.count(p) == 2)
                plan: dict[Color, tuple[str, int | None]] = {}
                for c in cols:
                    if c.sources == rep:
                        plan[c] = (GREEDY, None)
                    else:
                        (extra,) = set(c.sources) - set(rep)
                        plan[c] = (PROPAGATE, extra)
                return "3-colors/222/two-source-pairs", plan
            return "3-colors/222/three-source-pairs", {c: (TABLE_CODE, None) for c in cols}
        if seq == (1, 2, 3):
            tpairs = [c.terminals for c in cols]
            shared = next(p for p in tpairs if tpairs.count(p) == 2)
            return "3-colors/123", {c: (TABLE_CODE if c.terminals == shared else GREEDY, None) for c in cols}
        raise DispatchError(f"unexpected degree sequence {seq} for three colors")
    # four or more colors: some terminal pair is shared by at least two colors
    tpairs = [c.terminals for c in cols]
    shared = next(p for p in sorted(set(tpairs)) if tpairs.count(p) >= 2)
    (rest,) = {1, 2, 3} - set(shared)
    others = [c for c in cols if c.terminals != shared]
    rest_kind = GREEDY if len({c.sources for c in others}) == 1 else TABLE_CODE
    plan = {c: (TABLE_CODE, None) for c in cols if c.terminals == shared}
    plan.update({c: (rest_kind, None) for c in others})
    return f"4+-colors/{rest_kind}", plan


def _leaf_on(net: Network, path, decomp: DecompositionReport, j: int) -> str | None:
    for e in path:
        c = decomp.classes[e]
        if c.kind != R_EDGE:
            return net.edge[e].tail if c.terminal == j else None
    return None


def plan_3s3t(net: Network) -> Plan:
    """Dispatch decision for a structured 3s/3t network."""
    reach = reach_sets(net)
    for v in net.topo_order:
        lab = (len(reach[v].sources), len(reach[v].terminals))
        if lab == (3, 3):
            return Plan("case0", v, "case0")
    for v in net.topo_order:
        lab = (len(reach[v].sources), len(reach[v].terminals))
        if lab == (2, 3):
            return Plan("case1", v, "case1")
    for v in net.topo_order:
        lab = (len(reach[v].sources), len(reach[v].terminals))
        if lab == (3, 2):
            return Plan("case2", v, "case2")
    decomp = decompose(net)
    branch, strategies = _color_plan(net, decomp)
    return Plan("case3", None, "case3/" + branch, strategies, decomp)


# ---------------------------------------------------------------------------
# cases 0-2


def _source_feed(net: Network) -> dict[str, dict[InputRef, int]]:
    return {s: {SRC: 1} for s in net.sources}


def case0_33(net: Network, v: str, F: Field) -> Local:
    """All three sources meet at v, which reaches all three terminals: sum
    into v over an in-tree, multicast from v over an out-tree."""
    red_union = set().union(*(path_or_fail(net, s, v) for s in net.sources))
    blue_union = set().union(*(path_or_fail(net, v, t) for t in net.terminals))
    if red_union & blue_union:
        raise DispatchError(f"paths into and out of {v} share an edge")
    red = in_tree(net, red_union, v)
    blue = out_tree(net, blue_union, v)
    feed = _source_feed(net)
    feed[v] = {e: 1 for e in net.in_edges[v] if e in red}
    return sum_code(net, red | blue, feed)


def case1_23(net: Network, v: str, F: Field) -> Local:
    """v sees two sources and all terminals: it computes their sum over an
    in-tree, then acts as a source of that sum in a two-payload greedy code
    together with the remaining source."""
    reach = reach_sets(net)
    pair = sorted(reach[v].sources)
    if len(pair) != 2 or len(reach[v].terminals) != 3:
        raise DispatchError(f"{v} is not a (2,3) node")
    (a,) = {1, 2, 3} - set(pair)
    union = set().union(*(path_or_fail(net, net.sources[i - 1], v) for i in pair))
    blue = in_tree(net, union, v)
    blue_nodes = {net.edge[e].tail for e in blue} | {v}
    sa = net.sources[a - 1]
    touched = [u for u in blue_nodes if a in reach[u].sources]
    if touched:
        raise DispatchError(f"source s{a} reaches the tree into {v} at {touched[0]}")
    local = sum_code(net, blue, _source_feed(net))
    origins = {
        sa: [(0, {SRC: 1})],
        v: [(1, {e: 1 for e in net.in_edges[v] if e in blue})],
    }
    rest = {e.id for e in net.edges} - blue
    more, _ = greedy_code(net, rest, origins)
    local.update(more)
    return local


def case2_32(net: Network, v: str, F: Field) -> Local:
    """v sees all sources but only two terminals t_a, t_b.  Sum into v over
    an in-tree and forward to t_a and t_b; the third terminal t_c collects
    each source along paths that leave v's tree before v."""
    reach = reach_sets(net)
    if len(reach[v].sources) != 3 or len(reach[v].terminals) != 2:
        raise DispatchError(f"{v} is not a (3,2) node")
    ta, tb = (net.terminals[j - 1] for j in sorted(reach[v].terminals))
    (c,) = {1, 2, 3} - set(reach[v].terminals)
    tc = net.terminals[c - 1]
    union = set().union(*(path_or_fail(net, s, v) for s in net.sources))
    vtree = in_tree(net, union, v)
    to_v = {s: tree_path(net, vtree, s, v) for s in net.sources}
    o_paths = [path_or_fail(net, v, ta), path_or_fail(net, v, tb)]
    o_nodes = set().union(*(path_node_set(net, p) for p in o_paths))
    q = {s: path_or_fail(net, s, tc) for s in net.sources}

    starts = {}
    for s in net.sources:
        qn = path_node_set(net, q[s])
        for s2 in net.sources:
            if s2 != s and qn & path_node_set(net, to_v[s2]):
                raise DispatchError(f"path {s}->{tc} meets the tree path of {s2}")
        if qn & o_nodes:
            raise DispatchError(f"path {s}->{tc} meets a path out of {v}")
        along = [s] + [net.edge[e].head for e in to_v[s]]
        vi = [u for u in along if u in qn][-1]
        starts[s] = vi

    w_union: set[int] = set()
    for s, vi in starts.items():
        nodes = [s] + [net.edge[e].head for e in q[s]]
        w_union |= set(q[s][nodes.index(vi):])
    wtree = in_tree(net, w_union, tc)
    otree = out_tree(net, set().union(*o_paths), v)
    if (vtree & wtree) or (vtree & otree) or (wtree & otree):
        raise DispatchError("trees of the (3,2) construction overlap")

    feed = _source_feed(net)
    local = sum_code(net, vtree, feed)
    vfeed = {v: {e: 1 for e in net.in_edges[v] if e in vtree}}
    local.update(sum_code(net, otree, vfeed))
    wfeed: dict[str, dict[InputRef, int]] = {}
    for s, vi in starts.items():
        if vi == s:
            wfeed[vi] = {SRC: 1}
        else:
            wfeed[vi] = {e: 1 for e in net.in_edges[vi] if e in vtree}
    local.update(sum_code(net, wtree, wfeed))
    return local


# ---------------------------------------------------------------------------
# case 3


def _targets(net: Network, plan: Plan, F: Field) -> dict[str, list[int]]:
    """Vector each node must form on its outgoing r-edges."""
    decomp = plan.decomp
    reach = reach_sets(net)
    n = net.n_sources
    out = {}
    for v in net.topo_order:
        cs, ct = decomp.labels[v]
        if ct < 2:
            continue
        if cs == 1:
            (i,) = reach[v].sources
            out[v] = unit(n, i - 1)
        elif cs == 2:
            c = decomp.colors[v]
            kind, arg = plan.strategies[c]
            if kind == GREEDY:
                vec = [0] * n
                for i in c.sources:
                    vec[i - 1] = 1
                out[v] = vec
            elif kind == TABLE_CODE:
                out[v] = table_vector(F, c.sources)
            elif kind == PROPAGATE:
                out[v] = unit(n, arg - 1)
            else:
                raise DispatchError(f"no deterministic payload for strategy {kind}")
        else:
            out[v] = [0] * n
    return out


def _realize(net: Network, F: Field, v: str, target: list[int], beta: dict[int, list[int]]) -> dict[InputRef, int]:
    n = net.n_sources
    refs: list[InputRef] = []
    rows = []
    if net.node[v].role == SOURCE:
        refs.append(SRC)
        rows.append(unit(n, net.node[v].index - 1))
    for e in net.in_edges[v]:
        refs.append(e)
        rows.append(beta.get(e, [0] * n))
    if not any(target):
        return {}
    sol = in_span(F, target, rows) if rows else None
    if sol is None:
        raise DispatchError(f"node {v} cannot form {target} from its inputs")
    return {r: c for r, c in zip(refs, sol) if c}


def _finish(net: Network, F: Field, decomp: DecompositionReport, local: Local, leaf_values) -> Local:
    for t in net.terminals:
        j = net.node[t].index
        region = terminal_edges(decomp.classes, j)
        routed = route_to_terminal(net, F, region, t, decomp.leaves[j], leaf_values)
        if routed is None:
            raise DispatchError(f"leaves of {t} do not span the sum")
        local.update(routed)
    return local


def case3_colors(net: Network, plan: Plan, F: Field) -> Local:
    decomp = plan.decomp
    targets = _targets(net, plan, F)
    beta: dict[int, list[int]] = {}
    realized: dict[str, dict[InputRef, int]] = {}
    local: Local = {}
    for e in net.edges_topo:
        if decomp.classes[e].kind != R_EDGE:
            continue
        x = net.edge[e].tail
        if x not in realized:
            realized[x] = _realize(net, F, x, targets[x], beta)
        local[e] = dict(realized[x])
        beta[e] = targets[x]
    leaf_values = {}
    for ls in decomp.leaves.values():
        for u in ls:
            if u not in realized:
                realized[u] = _realize(net, F, u, targets[u], beta)
            leaf_values[u] = (targets[u], realized[u])
    return _finish(net, F, decomp, local, leaf_values)


def case3_random(net: Network, plan: Plan, F: Field, seed: int, retries: int) -> tuple[Local, int]:
    setup = randomized.prepare(net, plan.decomp)
    res = randomized.random_color_code(net, seed, F, retries, setup)
    local = dict(res.local)
    return _finish(net, F, plan.decomp, local, res.leaf_values), res.attempts


# ---------------------------------------------------------------------------


def _needs_odd_characteristic(plan: Plan) -> bool:
    if plan.branch.endswith("033"):
        return True
    return any(kind == TABLE_CODE for kind, _ in plan.strategies.values())


def assign_3s_3t(
    net: Network,
    field: Field | str | None = None,
    seed: int = 0,
    retries: int = randomized.DEFAULT_RETRIES,
) -> CodeAssignment:
    """Code delivering X1+X2+X3 to all three terminals of a structured
    network with two vertex-disjoint paths between every source/terminal
    pair.  Without an explicit field, GF(3) is used, or GF(2^8) when the
    randomized two-color construction applies."""
    check_3s3t(net)
    plan = plan_3s3t(net)
    is_random = any(kind == RANDOM for kind, _ in plan.strategies.values())
    F = field_make(field if field is not None else (RANDOM_FIELD if is_random else DEFAULT_FIELD))
    if F.characteristic == 2 and _needs_odd_characteristic(plan):
        raise FieldError(f"branch {plan.branch} needs a field of characteristic > 2, got {F}")
    meta: dict = {"strategy": "3s3t", "branch": plan.branch}
    if plan.case == "case0":
        local = case0_33(net, plan.node, F)
    elif plan.case == "case1":
        local = case1_23(net, plan.node, F)
    elif plan.case == "case2":
        local = case2_32(net, plan.node, F)
    elif is_random:
        local, attempts = case3_random(net, plan, F, seed, retries)
        meta.update({"seed": seed, "attempts": attempts})
    else:
        local = case3_colors(net, plan, F)
    code = CodeAssignment(F, local, meta)
    report = check_sum_decodable(net, code)
    if not report.ok:
        raise DispatchError(f"branch {plan.branch} produced a code failing at terminals {report.failing()}")
    return code
