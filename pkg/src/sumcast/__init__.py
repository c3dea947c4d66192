"""Linear network codes for sum multicast: every terminal of a directed
acyclic network recovers the sum of all source symbols."""

from .code import SRC, CodeAssignment, load_code, parse_code
from .codegen import assign, assign_3s_3t, assign_greedy_2s, assign_ns_2t, extract_one_path_subgraph, plan_3s3t
from .decompose import decompose
from .errors import SumcastError
from .ff import Field, binary_field, field_make, in_span, prime_field
from .netgraph import Edge, Network, Node, load_network, max_flow, normalize, parse_network
from .transform import lift_code, reduce_degrees
from .verify import check_sum_decodable, propagate

__version__ = "0.1.0"

__all__ = [
    "SRC",
    "plan_3s3t",
    "CodeAssignment",
    "Edge",
    "Field",
    "Network",
    "Node",
    "SumcastError",
    "assign",
    "assign_3s_3t",
    "assign_greedy_2s",
    "assign_ns_2t",
    "binary_field",
    "check_sum_decodable",
    "decompose",
    "extract_one_path_subgraph",
    "field_make",
    "in_span",
    "lift_code",
    "load_code",
    "load_network",
    "max_flow",
    "normalize",
    "parse_code",
    "parse_network",
    "prime_field",
    "propagate",
    "reduce_degrees",
]
