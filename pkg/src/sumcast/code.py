"""Linear network code assignments (local encoding coefficients per edge)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .errors import CodeError
from .ff import Field, field_make
from .netgraph import SOURCE, Network

# Input key meaning "the source symbol observed at the tail node".
SRC = "source"

InputRef = Union[int, str]


@dataclass
class CodeAssignment:
    """Per-edge map ``input -> coefficient``.

    An input is either the id of an edge entering the tail node or ``SRC``
    when the tail is a source.  Edges without an entry (or with an empty map)
    carry the zero symbol.
    """

    field: Field
    local: dict[int, dict[InputRef, int]]
    meta: dict = field(default_factory=dict)

    def coeffs(self, eid: int) -> dict[InputRef, int]:
        return self.local.get(eid, {})

    def active_edges(self) -> set[int]:
        return {e for e, m in self.local.items() if any(m.values())}

    def validate(self, net: Network) -> None:
        F = self.field
        for eid, m in self.local.items():
            if eid not in net.edge:
                raise CodeError(f"code refers to unknown edge {eid}")
            tail = net.edge[eid].tail
            inputs = set(net.in_edges[tail])
            for ref, c in m.items():
                F.check(c)
                if ref == SRC:
                    if net.node[tail].role != SOURCE:
                        raise CodeError(f"edge {eid}: tail {tail!r} observes no source")
                elif ref not in inputs:
                    raise CodeError(f"edge {eid}: input {ref!r} does not enter {tail!r}")

    def completed(self, net: Network) -> "CodeAssignment":
        """Same code with an explicit (possibly empty) entry for every edge."""
        local = {e.id: dict(self.local.get(e.id, {})) for e in net.edges}
        return CodeAssignment(self.field, local, dict(self.meta))

    def to_json(self) -> dict:
        edges = []
        for eid in sorted(self.local):
            refs = sorted(self.local[eid].items(), key=lambda kv: (kv[0] != SRC, kv[0] if kv[0] != SRC else -1))
            edges.append({"id": eid, "local": [{"input": r, "coef": c} for r, c in refs if c]})
        out = {"field": self.field.spec, "edges": edges}
        if self.meta:
            out["meta"] = self.meta
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def parse_code(text: str | dict) -> CodeAssignment:
    data = json.loads(text) if isinstance(text, str) else text
    try:
        F = field_make(data["field"])
        local: dict[int, dict[InputRef, int]] = {}
        for entry in data["edges"]:
            m: dict[InputRef, int] = {}
            for item in entry["local"]:
                ref = item["input"]
                m[SRC if ref == SRC else int(ref)] = F.check(int(item["coef"]))
            local[int(entry["id"])] = m
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeError(f"malformed code JSON: {exc}") from None
    return CodeAssignment(F, local, dict(data.get("meta", {})))


def load_code(path: str) -> CodeAssignment:
    with open(path, encoding="utf-8") as fh:
        return parse_code(fh.read())
