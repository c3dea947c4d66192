"""Global coding vectors, sum-decodability certificates and brute-force
feasibility oracles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .code import SRC, CodeAssignment
from .errors import CodeError, FieldError, InstanceTooLarge
from .ff import Field, field_make, in_span, rank, unit
from .netgraph import SOURCE, Network

SEARCH_BUDGET = 10**8


# ---------------------------------------------------------------------------
# propagation


def propagate(net: Network, code: CodeAssignment) -> dict[int, list[int]]:
    """Global coding vector of every edge (one topological sweep)."""
    code.validate(net)
    F = code.field
    n = net.n_sources
    beta: dict[int, list[int]] = {}
    for eid in net.edges_topo:
        tail = net.edge[eid].tail
        vec = [0] * n
        for ref, c in code.coeffs(eid).items():
            if not c:
                continue
            if ref == SRC:
                src = unit(n, net.node[tail].index - 1)
            else:
                if ref not in beta:  # pragma: no cover - guarded by validate
                    raise CodeError(f"edge {eid} reads {ref} before it is computed")
                src = beta[ref]
            vec = F.axpy(c, src, vec)
        beta[eid] = vec
    return beta


def evaluate(net: Network, code: CodeAssignment, values: Sequence[int]) -> dict[int, int]:
    """Symbol carried by every edge when source i emits ``values[i-1]``."""
    F = code.field
    out: dict[int, int] = {}
    for eid in net.edges_topo:
        tail = net.edge[eid].tail
        y = 0
        for ref, c in code.coeffs(eid).items():
            x = values[net.node[tail].index - 1] if ref == SRC else out[ref]
            y = F.add(y, F.mul(c, x))
        out[eid] = y
    return out


@dataclass
class TerminalReport:
    index: int
    node: str
    decodable: bool
    coefficients: dict[int, int] | None  # incoming edge id -> decode weight
    rank: int
    rank_with_target: int

    def to_json(self) -> dict:
        out = {
            "terminal": self.index,
            "node": self.node,
            "decodable": self.decodable,
            "rank": self.rank,
            "rank_with_target": self.rank_with_target,
        }
        if self.coefficients is not None:
            out["decode"] = [{"edge": e, "coef": c} for e, c in sorted(self.coefficients.items())]
        return out


@dataclass
class VerificationReport:
    field: Field
    target: list[int]
    terminals: list[TerminalReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(t.decodable for t in self.terminals)

    def failing(self) -> list[int]:
        return [t.index for t in self.terminals if not t.decodable]

    def to_json(self) -> dict:
        return {
            "field": self.field.spec,
            "target": self.target,
            "decodable": self.ok,
            "terminals": [t.to_json() for t in self.terminals],
        }


def check_sum_decodable(
    net: Network, code: CodeAssignment, weights: Sequence[int] | None = None
) -> VerificationReport:
    """Per terminal: is the target vector (default all ones) in the span of
    the incoming global coding vectors?"""
    F = code.field
    n = net.n_sources
    target = [F.check(w) for w in weights] if weights is not None else [1] * n
    if len(target) != n:
        raise FieldError(f"weights have length {len(target)}, network has {n} sources")
    beta = propagate(net, code)
    report = VerificationReport(F, target)
    for t in net.terminals:
        inc = net.in_edges[t]
        rows = [beta[e] for e in inc]
        sol = in_span(F, target, rows)
        r = rank(F, rows)
        report.terminals.append(
            TerminalReport(
                net.node[t].index,
                t,
                sol is not None,
                dict(zip(inc, sol)) if sol is not None else None,
                r,
                rank(F, rows + [target]),
            )
        )
    return report


def replay_decodable(
    net: Network, code: CodeAssignment, weights: Sequence[int] | None = None
) -> dict[int, bool]:
    """Brute force: a terminal can compute the weighted sum iff no two source
    tuples agree on everything it receives but differ in the sum."""
    F = code.field
    n = net.n_sources
    w = list(weights) if weights is not None else [1] * n
    seen: dict[int, dict[tuple, int]] = {net.node[t].index: {} for t in net.terminals}
    ok = {k: True for k in seen}
    for values in itertools.product(range(F.order), repeat=n):
        sym = evaluate(net, code, values)
        total = F.dot(w, values)
        for t in net.terminals:
            k = net.node[t].index
            if not ok[k]:
                continue
            key = tuple(sym[e] for e in net.in_edges[t])
            prev = seen[k].setdefault(key, total)
            if prev != total:
                ok[k] = False
    return ok


# ---------------------------------------------------------------------------
# functionality of the sum given fixed linear observations


@dataclass
class FunctionalityResult:
    functional: bool
    collision: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def to_json(self) -> dict:
        out = {"functional": self.functional}
        if self.collision:
            out["collision"] = [list(x) for x in self.collision]
        return out


def sum_functionality_oracle(
    field_: Field | str,
    observed: Sequence[Sequence[int]] = ((1, 1, 0), (0, 1, 1)),
) -> FunctionalityResult:
    """Does the tuple of observed linear combinations determine the sum of all
    sources?  Exhaustive over the field; returns the first colliding pair."""
    F = field_make(field_)
    n = len(observed[0])
    first: dict[tuple, tuple[tuple[int, ...], int]] = {}
    ones = [1] * n
    for x in itertools.product(range(F.order), repeat=n):
        key = tuple(F.dot(row, x) for row in observed)
        s = F.dot(ones, x)
        if key in first:
            y, sy = first[key]
            if sy != s:
                return FunctionalityResult(False, (y, x))
        else:
            first[key] = (x, s)
    return FunctionalityResult(True)


# ---------------------------------------------------------------------------
# exhaustive search over all (nonlinear) codes


def _rg_count(length: int, q: int) -> int:
    """Number of restricted-growth strings of given length over q symbols
    (set partitions into at most q blocks)."""
    # Stirling numbers of the second kind by recurrence
    row = [1] + [0] * q
    for _ in range(length):
        new = [0] * (q + 1)
        for k in range(1, q + 1):
            new[k] = k * row[k] + row[k - 1]
        row = new
    return sum(row[1:]) if length else 1


def _rg_strings(length: int, q: int):
    """Restricted-growth strings: canonical output labelings of a table."""
    if length == 0:
        yield ()
        return
    out = [0] * length

    def rec(i, top):
        if i == length:
            yield tuple(out)
            return
        for v in range(min(top + 2, q)):
            out[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def _inputs_of(net: Network, eid: int) -> tuple[bool, list[int]]:
    tail = net.edge[eid].tail
    return net.node[tail].role == SOURCE, net.in_edges[tail]


def search_size(net: Network, q: int) -> int:
    """Number of canonical function-table assignments the search may visit."""
    total = 1
    for e in net.edges:
        is_src, ins = _inputs_of(net, e.id)
        total *= _rg_count(q ** (len(ins) + int(is_src)), q)
    return total


@dataclass
class SearchResult:
    feasible: bool
    explored: int
    size: int
    witness: dict[int, dict[tuple, int]] | None = None

    def to_json(self) -> dict:
        out = {"feasible": self.feasible, "explored": self.explored, "search_size": self.size}
        if self.witness is not None:
            out["witness"] = [
                {"edge": e, "table": [{"in": list(k), "out": v} for k, v in sorted(t.items())]}
                for e, t in sorted(self.witness.items())
            ]
        return out


def exhaustive_code_search(
    net: Network, field_: Field | str, budget: int = SEARCH_BUDGET
) -> SearchResult:
    """Decide whether ANY code (arbitrary per-edge functions over the field
    alphabet) lets every terminal compute the sum of the sources.

    Edge functions are enumerated up to relabeling of each edge's output
    alphabet (restricted-growth canonical form), which loses no generality
    because downstream tables can absorb any relabeling.  Tables are only
    defined on input combinations that actually occur.  A branch is cut as
    soon as some terminal with all inputs fixed cannot decode.
    """
    F = field_make(field_)
    q = F.order
    n = net.n_sources
    size = search_size(net, q)
    if size > budget:
        raise InstanceTooLarge(f"search space {size} exceeds budget {budget}")
    tuples = list(itertools.product(range(q), repeat=n))
    sums = [F.dot([1] * n, x) for x in tuples]
    order = net.edges_topo
    last_input = {}
    for t in net.terminals:
        if net.in_edges[t]:
            last_input.setdefault(max(net.in_edges[t], key=order.index), []).append(t)
        else:
            return SearchResult(False, 0, size)
    values: dict[int, list[int]] = {}
    tables: dict[int, dict[tuple, int]] = {}
    explored = 0

    def terminal_ok(t: str) -> bool:
        seen: dict[tuple, int] = {}
        ins = net.in_edges[t]
        for k in range(len(tuples)):
            key = tuple(values[e][k] for e in ins)
            if seen.setdefault(key, sums[k]) != sums[k]:
                return False
        return True

    def rec(pos: int) -> bool:
        nonlocal explored
        if pos == len(order):
            return True
        eid = order[pos]
        is_src, ins = _inputs_of(net, eid)
        idx = net.node[net.edge[eid].tail].index - 1 if is_src else None
        keys = []
        for k, x in enumerate(tuples):
            key = ((x[idx],) if is_src else ()) + tuple(values[e][k] for e in ins)
            keys.append(key)
        domain = sorted(set(keys))
        slot = {key: i for i, key in enumerate(domain)}
        for labels in _rg_strings(len(domain), q):
            explored += 1
            values[eid] = [labels[slot[key]] for key in keys]
            if all(terminal_ok(t) for t in last_input.get(eid, ())):
                tables[eid] = dict(zip(domain, labels))
                if rec(pos + 1):
                    return True
        values.pop(eid, None)
        tables.pop(eid, None)
        return False

    found = rec(0)
    return SearchResult(found, explored, size, dict(tables) if found else None)


# ---------------------------------------------------------------------------
# two-source two-terminal vector-sum oracle


@dataclass
class VectorOracleResult:
    field: str
    require: tuple[str, ...]
    feasible: bool
    enumerated: int
    satisfying: int
    witness: dict | None = None

    def to_json(self) -> dict:
        out = {
            "field": self.field,
            "require": list(self.require),
            "result": "feasible" if self.feasible else "infeasible",
            "enumerated": self.enumerated,
            "satisfying": self.satisfying,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _matmul2(F: Field, a, b):
    return (
        (F.add(F.mul(a[0][0], b[0][0]), F.mul(a[0][1], b[1][0])),
         F.add(F.mul(a[0][0], b[0][1]), F.mul(a[0][1], b[1][1]))),
        (F.add(F.mul(a[1][0], b[0][0]), F.mul(a[1][1], b[1][0])),
         F.add(F.mul(a[1][0], b[0][1]), F.mul(a[1][1], b[1][1]))),
    )


def _det2(F: Field, m) -> int:
    return F.sub(F.mul(m[0][0], m[1][1]), F.mul(m[0][1], m[1][0]))


def vector_block_shapes(params: Sequence[int], terminal: str):
    """Left/right 2x2 blocks of a terminal's received matrix (acting on
    (a1,a2) and (b1,b2)) in the fixed parametrization."""
    p1, p2, p3, p4 = params
    if terminal == "T1":
        return ((p1, p2), (0, p2)), ((p3, 0), (p3, p4))
    return ((p1, 0), (0, p2)), ((p3, 0), (0, p4))


def vector_2s2t_oracle(
    field_: Field | str, require: Sequence[str] = ("T1", "T2")
) -> VectorOracleResult:
    """Enumerate every linear scheme of the fixed two-terminal parametrization.

    Each source emits a length-2 vector, premixed by A1 (resp. B1).  A
    terminal with received blocks (L, R) sees L*A1*a + R*B1*b and recovers
    a+b iff L*A1 = R*B1 is invertible.  All q^16 assignments are counted;
    the per-terminal parameters are factored out so the work is q^8 * q^2.
    """
    F = field_make(field_)
    q = F.order
    if q > 5:
        raise InstanceTooLarge(f"vector oracle limited to fields of size <= 5, got {q}")
    require = tuple(require)
    for r in require:
        if r not in ("T1", "T2"):
            raise ValueError(f"unknown terminal {r!r}")
    els = range(q)
    mats = [((a, b), (c, d)) for a, b, c, d in itertools.product(els, repeat=4)]
    pairs = list(itertools.product(els, repeat=2))
    satisfying = 0
    witness = None
    for A1 in mats:
        for B1 in mats:
            per_term = {}
            for term in ("T1", "T2"):
                if term not in require:
                    per_term[term] = (q**4, None)
                    continue
                left: dict = {}
                for p1, p2 in pairs:
                    L, _ = vector_block_shapes((p1, p2, 0, 0), term)
                    left.setdefault(_matmul2(F, L, A1), []).append((p1, p2))
                count = 0
                first = None
                for p3, p4 in pairs:
                    _, R = vector_block_shapes((0, 0, p3, p4), term)
                    P = _matmul2(F, R, B1)
                    if P in left and _det2(F, P):
                        count += len(left[P])
                        if first is None:
                            first = left[P][0] + (p3, p4)
                per_term[term] = (count, first)
            n1, w1 = per_term["T1"]
            n2, w2 = per_term["T2"]
            satisfying += n1 * n2
            if witness is None and n1 and n2:
                witness = {"A1": [list(r) for r in A1], "B1": [list(r) for r in B1]}
                if w1:
                    witness["T1"] = list(w1)
                if w2:
                    witness["T2"] = list(w2)
    return VectorOracleResult(F.spec, require, satisfying > 0, q**16, satisfying, witness)


def schwartz_zippel_bound(m: int, n_nodes: int) -> float:
    """Success probability lower bound (1 - 2^(1-m))^|V|."""
    return (1.0 - 2.0 ** (1 - m)) ** n_nodes


def binomial_lower_quantile(n: int, p: float, alpha: float = 0.01) -> int:
    """Largest k with P[Bin(n, p) < k] <= alpha."""
    acc = 0.0
    for k in range(n + 1):
        pk = comb(n, k) * p**k * (1 - p) ** (n - k)
        if acc + pk > alpha:
            return k
        acc += pk
    return n


__all__ = [
    "propagate",
    "evaluate",
    "check_sum_decodable",
    "replay_decodable",
    "sum_functionality_oracle",
    "exhaustive_code_search",
    "search_size",
    "vector_2s2t_oracle",
    "schwartz_zippel_bound",
    "binomial_lower_quantile",
    "VerificationReport",
    "TerminalReport",
]
