"""Command-line front end.  Every command prints (or writes) JSON; failures
exit nonzero with an error object."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .code import load_code
from .codegen import STRATEGIES, assign, plan_3s3t
from .decompose import decompose
from .errors import SumcastError
from .ff import field_make
from .netgraph import Network, flow_table, load_network
from .transform import reduce_degrees
from .verify import (
    check_sum_decodable,
    exhaustive_code_search,
    sum_functionality_oracle,
    vector_2s2t_oracle,
)

DEMOS = ("counterexample-3s3t", "vector-2s2t")


def _emit(data, path: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _need_input(args) -> Network:
    if not args.input:
        raise SumcastError("--input is required for this command")
    return load_network(args.input)


def _flows(net: Network, mode: str) -> dict[str, int]:
    return {f"s{i}-t{j}": f for (i, j), f in sorted(flow_table(net, mode).items())}


def cmd_check(args) -> int:
    net = _need_input(args)
    edge = flow_table(net, "edge")
    ns, nt = net.n_sources, net.n_terminals
    connected = all(f >= 1 for f in edge.values())
    hyp = {
        "two_sources": ns == 2 and connected,
        "two_terminals": nt == 2 and connected,
        "three_by_three": (ns, nt) == (3, 3) and all(f >= 2 for f in edge.values()),
    }
    out = {
        "sources": ns,
        "terminals": nt,
        "max_flow": _flows(net, "edge"),
        "vertex_flow": _flows(net, "vertex"),
        "hypotheses": hyp,
        "structured": net.is_structured(),
    }
    _emit(out, args.output)
    return 0


def cmd_transform(args) -> int:
    red = reduce_degrees(_need_input(args))
    _emit({"network": red.reduced.to_json(), "mapping": red.to_json()}, args.output)
    return 0


def cmd_decompose(args) -> int:
    net = _need_input(args)
    out = decompose(net).to_json()
    if (net.n_sources, net.n_terminals) == (3, 3) and net.is_structured():
        out["dispatch"] = plan_3s3t(net).to_json()
    _emit(out, args.output)
    return 0


def cmd_assign(args) -> int:
    net = _need_input(args)
    code = assign(net, args.strategy, args.field, args.seed, args.retries)
    report = check_sum_decodable(net, code)
    if not report.ok:
        _emit({"error": "verification", "report": report.to_json()}, None)
        return 1
    _emit(code.to_json(), args.output)
    if args.output:
        sys.stdout.write(json.dumps({"verified": True, "report": report.to_json()}, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_verify(args) -> int:
    net = _need_input(args)
    if not args.code:
        raise SumcastError("--code is required for verify")
    code = load_code(args.code)
    code.validate(net)
    report = check_sum_decodable(net, code)
    _emit(report.to_json(), args.output)
    return 0 if report.ok else 1


def cmd_demo(args) -> int:
    if args.name == "vector-2s2t":
        field = args.field or "prime:3"
        both = vector_2s2t_oracle(field)
        single = vector_2s2t_oracle(field, require=("T2",))
        _emit({"both_terminals": both.to_json(), "single_terminal": single.to_json()}, args.output)
        return 0
    from .instances import demo_network

    net = load_network(args.input) if args.input else demo_network()
    fields = [args.field] if args.field else ["prime:2", "prime:3", "gf2m:2", "prime:5"]
    flows = flow_table(net, "edge")
    out = {
        "max_flow": _flows(net, "edge"),
        "all_pairs_connected": all(f >= 1 for f in flows.values()),
        "some_pair_below_two": any(f < 2 for f in flows.values()),
        "functionality": {f: sum_functionality_oracle(f).to_json() for f in fields},
        "exhaustive_search": exhaustive_code_search(net, args.field or "prime:2").to_json(),
    }
    _emit(out, args.output)
    return 0


def cmd_selftest(args) -> int:
    from . import instances

    results = {}
    fails = 0

    def run(name, nets):
        nonlocal fails
        ok = 0
        total = 0
        for net in nets:
            total += 1
            try:
                code = assign(net, "auto", None, args.seed, args.retries)
                ok += check_sum_decodable(net, code).ok
            except SumcastError:
                pass
        results[name] = {"passed": ok, "total": total}
        fails += total - ok

    n = args.count
    base = args.seed * 100003
    run("two_sources", (instances.random_2s(base + k) for k in range(n)))
    run("two_terminals", (instances.random_ns_2t(base + k) for k in range(n)))
    run("three_by_three", (net for _, net in instances.stratified_suite(n, base)))
    run("three_by_three_reduced", (instances.random_3s3t(base + k) for k in range(max(1, n // 4))))
    _emit(results, args.output)
    return 0 if fails == 0 else 1


COMMANDS = {
    "check": cmd_check,
    "transform": cmd_transform,
    "decompose": cmd_decompose,
    "assign": cmd_assign,
    "verify": cmd_verify,
    "demo": cmd_demo,
    "selftest": cmd_selftest,
}


def _field_arg(text: str) -> str:
    try:
        return field_make(text).spec
    except SumcastError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed_arg(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="network JSON file")
    common.add_argument("--output", help="write the JSON result here instead of stdout")
    common.add_argument("--field", type=_field_arg, default=None, help="prime:<p> or gf2m:<m>")
    common.add_argument("--seed", type=_seed_arg, default=0)
    common.add_argument("--retries", type=int, default=32, help="resamples for the randomized branch")

    p = argparse.ArgumentParser(prog="sumcast", description="Linear codes for sum multicast over DAGs.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="max-flow table and construction hypotheses")
    sub.add_parser("transform", parents=[common], help="reduce internal degrees to at most 3")
    sub.add_parser("decompose", parents=[common], help="labels, edge classes, leaf sets, colors")
    a = sub.add_parser("assign", parents=[common], help="build and verify a code")
    a.add_argument("--strategy", choices=STRATEGIES, default="auto")
    v = sub.add_parser("verify", parents=[common], help="check a code against a network")
    v.add_argument("--code", help="code JSON file")
    d = sub.add_parser("demo", parents=[common], help="run a fixed counterexample")
    d.add_argument("name", choices=DEMOS)
    s = sub.add_parser("selftest", parents=[common], help="run randomized instance families")
    s.add_argument("--count", type=int, default=20)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SumcastError as exc:
        sys.stdout.write(json.dumps(exc.to_json(), indent=2, sort_keys=True) + "\n")
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        sys.stdout.write(json.dumps({"error": "io", "message": str(exc)}, indent=2, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
