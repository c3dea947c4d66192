"""Random linear coding on the two-color region of a case-3 network whose
two colors differ in both their source pair and terminal pair.

Every node connected to one or two sources (and to at least two terminals)
draws uniform coefficients for each of its outgoing r-edges, and each leaf
draws a uniform combination of its inputs as the value it hands to its
terminals.  A sample is accepted when

* every (2,2) leaf of a color sees both of the color's sources,
* for each terminal of a color, the leaves on two vertex-disjoint paths from
  the color's private source give independent combinations (or, when one of
  them holds the private source alone, it and some leaf of the color do),
* every terminal's leaves span the all-ones vector.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..code import SRC, InputRef
from ..decompose import (
    R_EDGE,
    Color,
    DecompositionReport,
    canonical_two_color_relabel,
    decompose,
    distinct_colors,
    leaf_on_path,
)
from ..errors import DispatchError, RetriesExhausted
from ..ff import Field, det, in_span, unit
from ..netgraph import SOURCE, Network, disjoint_paths

DEFAULT_RETRIES = 32


@dataclass
class _Check:
    color: Color
    terminal: int
    leaves: tuple[str, str]


@dataclass
class RandomSetup:
    """Structure that does not depend on the random draw."""

    net: Network
    decomp: DecompositionReport
    colors: tuple[Color, Color]
    region: list[str]  # nodes drawing random coefficients, topological order
    leaves: list[str]
    checks: list[_Check]
    relabel: tuple[dict[int, int], dict[int, int]]


def prepare(net: Network, decomp: DecompositionReport | None = None) -> RandomSetup:
    decomp = decomp or decompose(net)
    if decomp.forbidden:
        raise DispatchError("randomized construction needs a case-3 network")
    cols = distinct_colors(decomp.colors)
    if len(cols) != 2:
        raise DispatchError(f"randomized construction needs exactly two colors, found {len(cols)}")
    c1, c2 = cols
    relabel = canonical_two_color_relabel(c1, c2)
    shared = (set(c1.sources) & set(c2.sources)).pop()
    labels = decomp.labels
    region = [v for v in net.topo_order if labels[v][1] >= 2 and labels[v][0] in (1, 2)]
    all_leaves = sorted({u for ls in decomp.leaves.values() for u in ls}, key=net.topo_rank.__getitem__)
    checks = []
    for c in (c1, c2):
        (private,) = set(c.sources) - {shared}
        s = net.sources[private - 1]
        for j in c.terminals:
            t = net.terminals[j - 1]
            paths = disjoint_paths(net, s, t, 2, mode="vertex")
            u1, u2 = (leaf_on_path(net, p, decomp.classes) for p in paths)
            if labels[u1] == (2, 2) and labels[u2] == (2, 2):
                pair = (u1, u2)
            else:
                single = u1 if labels[u1][0] == 1 else u2
                if labels[single][0] != 1:
                    raise DispatchError(f"leaves {u1}, {u2} of t{j} are neither (2,2) nor singleton")
                partner = next((u for u in decomp.leaves[j] if decomp.colors.get(u) == c), None)
                if partner is None:
                    raise DispatchError(f"t{j} has no leaf of color {c}")
                pair = (single, partner)
            checks.append(_Check(c, j, pair))
    return RandomSetup(net, decomp, (c1, c2), region, all_leaves, checks, relabel)


@dataclass
class RandomColorResult:
    local: dict[int, dict[InputRef, int]]
    leaf_values: dict[str, tuple[list[int], dict[InputRef, int]]]
    attempts: int
    seed: int
    relabel: tuple[dict[int, int], dict[int, int]] = field(default_factory=lambda: ({}, {}))


def _draw(setup: RandomSetup, F: Field, rng: random.Random):
    net = setup.net
    n = net.n_sources
    in_region = set(setup.region)
    classes = setup.decomp.classes
    beta: dict[int, list[int]] = {}
    local: dict[int, dict[InputRef, int]] = {}

    def inputs(x):
        refs: list[tuple[InputRef, list[int]]] = []
        if net.node[x].role == SOURCE:
            refs.append((SRC, unit(n, net.node[x].index - 1)))
        refs += [(i, beta.get(i, [0] * n)) for i in net.in_edges[x]]
        return refs

    for e in net.edges_topo:
        if classes[e].kind != R_EDGE:
            continue
        x = net.edge[e].tail
        vec = [0] * n
        coeffs: dict[InputRef, int] = {}
        if x in in_region:
            for ref, b in inputs(x):
                c = rng.randrange(F.order)
                if c:
                    coeffs[ref] = c
                    vec = F.axpy(c, b, vec)
        local[e] = coeffs
        beta[e] = vec
    values = {}
    for u in setup.leaves:
        vec = [0] * n
        coeffs = {}
        if u in in_region:
            for ref, b in inputs(u):
                c = rng.randrange(F.order)
                if c:
                    coeffs[ref] = c
                    vec = F.axpy(c, b, vec)
        values[u] = (vec, coeffs)
    return local, values


def _evaluate(setup: RandomSetup, F: Field, values) -> dict | None:
    """First failed acceptance test as a witness dict, or None."""
    decomp = setup.decomp
    for c in setup.colors:
        a, b = (i - 1 for i in c.sources)
        for j in c.terminals:
            for u in decomp.leaves[j]:
                if decomp.colors.get(u) == c:
                    v = values[u][0]
                    if not v[a] or not v[b]:
                        return {"check": "leaf-support", "color": str(c), "terminal": j, "leaf": u, "value": v}
    for chk in setup.checks:
        a, b = (i - 1 for i in chk.color.sources)
        rows = [[values[u][0][a], values[u][0][b]] for u in chk.leaves]
        d = det(F, rows)
        if not d:
            return {
                "check": "leaf-independence",
                "color": str(chk.color),
                "terminal": chk.terminal,
                "leaves": list(chk.leaves),
                "determinant": d,
            }
    n = setup.net.n_sources
    for j, ls in sorted(decomp.leaves.items()):
        if in_span(F, [1] * n, [values[u][0] for u in ls]) is None:
            return {"check": "terminal-span", "terminal": j, "leaves": list(ls)}
    return None


def random_color_code(
    net: Network,
    seed: int,
    field: Field,
    retries: int = DEFAULT_RETRIES,
    setup: RandomSetup | None = None,
) -> RandomColorResult:
    """Draw random coefficients until a sample passes every acceptance test.

    All draws come from one generator seeded with ``seed``, so the result is
    a pure function of (network, field, seed).
    """
    setup = setup or prepare(net)
    rng = random.Random(seed)
    witness = None
    for attempt in range(1, retries + 1):
        local, values = _draw(setup, field, rng)
        witness = _evaluate(setup, field, values)
        if witness is None:
            return RandomColorResult(local, values, attempt, seed, setup.relabel)
    raise RetriesExhausted(
        f"random coding failed {retries} times; last failure: {witness['check']}",
        attempts=retries,
        witness=witness,
    )
