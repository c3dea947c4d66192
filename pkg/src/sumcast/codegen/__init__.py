"""Code generators and the regime dispatcher."""

from __future__ import annotations

from ..code import CodeAssignment
from ..errors import UnsupportedRegime
from ..ff import Field
from ..netgraph import Network
from ..transform import lift_code, reduce_degrees
from .greedy import assign_greedy_2s, check_unit_connectivity
from .onepath import OnePathSubgraph, assign_ns_2t, augment_virtual, extract_one_path_subgraph
from .randomized import RandomColorResult, random_color_code
from .threes import Plan, assign_3s_3t, check_3s3t, plan_3s3t, table_vector

STRATEGIES = ("auto", "greedy2s", "ns2t", "3s3t")


def _three_by_three(net: Network, field, seed: int, retries: int) -> CodeAssignment:
    if net.is_structured():
        return assign_3s_3t(net, field, seed, retries)
    red = reduce_degrees(net)
    code = assign_3s_3t(red.reduced, field, seed, retries)
    lifted = lift_code(red, code)
    lifted.meta["reduced_nodes"] = len(red.reduced.nodes)
    return lifted


def assign(
    net: Network,
    strategy: str = "auto",
    field: Field | str | None = None,
    seed: int = 0,
    retries: int = 32,
) -> CodeAssignment:
    """Pick the construction for the network's (sources, terminals) regime.

    ``auto`` uses the two-source greedy code for 2 sources, the one-path
    subgraph code for 2 terminals and the case analysis for 3x3 (reducing
    node degrees first when needed).
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if strategy == "auto":
        ns, nt = net.n_sources, net.n_terminals
        if ns == 2:
            strategy = "greedy2s"
        elif nt == 2:
            strategy = "ns2t"
        elif (ns, nt) == (3, 3):
            strategy = "3s3t"
        else:
            raise UnsupportedRegime(
                f"no construction for {ns} sources and {nt} terminals (open problem beyond 3x3)"
            )
    if strategy == "greedy2s":
        return assign_greedy_2s(net, field if field is not None else "prime:2")
    if strategy == "ns2t":
        return assign_ns_2t(net, field if field is not None else "prime:2")
    return _three_by_three(net, field, seed, retries)


__all__ = [
    "STRATEGIES",
    "OnePathSubgraph",
    "Plan",
    "RandomColorResult",
    "assign",
    "assign_3s_3t",
    "assign_greedy_2s",
    "assign_ns_2t",
    "augment_virtual",
    "check_3s3t",
    "check_unit_connectivity",
    "extract_one_path_subgraph",
    "plan_3s3t",
    "random_color_code",
    "table_vector",
]
