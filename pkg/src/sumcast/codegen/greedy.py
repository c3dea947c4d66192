"""Two sources, any number of terminals: greedy {0,1} encoding."""

from __future__ import annotations

from ..code import SRC, CodeAssignment
from ..errors import PreconditionError
from ..ff import Field, field_make
from ..netgraph import Network, reach_sets
from .common import greedy_code


def check_unit_connectivity(net: Network) -> None:
    """Every source must reach every terminal (max-flow >= 1)."""
    reach = reach_sets(net)
    for s in net.sources:
        i = net.node[s].index
        for t in net.terminals:
            if i not in reach[t].sources:
                raise PreconditionError(f"no path from {s} to {t}", pair=(i, net.node[t].index))


def assign_greedy_2s(net: Network, field: Field | str = "prime:2") -> CodeAssignment:
    """Greedy code: an edge carries X_i (coefficient 1) exactly when its tail
    is downstream of s_i, realized by adding inputs with disjoint supports."""
    F = field_make(field)
    if net.n_sources != 2:
        raise PreconditionError(f"greedy encoding needs 2 sources, network has {net.n_sources}")
    check_unit_connectivity(net)
    origins = {s: [(net.node[s].index - 1, {SRC: 1})] for s in net.sources}
    local, _ = greedy_code(net, {e.id for e in net.edges}, origins)
    return CodeAssignment(F, local, {"strategy": "greedy2s"})
