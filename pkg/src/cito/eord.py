"""Object relation diagrams extended with transitive relationships.

The plain ORD holds direct class dependencies (inheritance, aggregation via
object-typed attributes, association via member use).  The extended diagram
adds an edge for every class pair joined by a transitive relationship chain:
a path of distinct members ``x -> y -> ... -> w`` where each hop is a method
call or attribute use.  Such an edge is labelled ``T`` when no direct
dependency exists and ``C`` when it combines with one.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .cfg import CallOperation, PathAnalysis
from .coupling import CouplingRecord, Weights, measure_data_coupling, normalize, scplx
from .model import ProgramModel

Member = tuple[str, str]  # (class, member)

DEFAULT_MAX_LEN = 3
CHAIN_LENGTHS = (3, 4, 5)


@dataclass(frozen=True)
class TransitiveChain:
    member_path: tuple[Member, ...]
    call_ops: tuple[CallOperation, ...]
    op_probabilities: tuple[float, ...]
    chain_probability: float

    @property
    def source(self) -> str:
        return self.member_path[0][0]

    @property
    def target(self) -> str:
        return self.member_path[-1][0]

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source, self.target)

    def __len__(self) -> int:
        return len(self.member_path)

    def describe(self) -> str:
        return " -> ".join(f"{c}.{m}" for c, m in self.member_path)


@dataclass(frozen=True)
class ControlComplexity:
    pair: tuple[str, str]
    chains: tuple[TransitiveChain, ...]
    value: float


@dataclass(frozen=True)
class DirectedEdge:
    src: str
    dst: str
    direct_kinds: frozenset[str]
    label: str  # D | T | C
    coupling: CouplingRecord

    @property
    def pair(self) -> tuple[str, str]:
        return (self.src, self.dst)

    def scplx(self, w: Weights) -> float:
        return scplx(self.coupling, w)


@dataclass(frozen=True)
class Eord:
    nodes: tuple[str, ...]
    edges: tuple[DirectedEdge, ...]
    chains: tuple[TransitiveChain, ...] = ()
    weights: Weights = field(default_factory=Weights)
    max_len: int = DEFAULT_MAX_LEN

    @cached_property
    def edge_map(self) -> dict[tuple[str, str], DirectedEdge]:
        return {e.pair: e for e in self.edges}

    def edge(self, src: str, dst: str) -> DirectedEdge:
        return self.edge_map[(src, dst)]

    def successors(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for e in self.edges:
            out[e.src].append(e.dst)
        return out

    def labelled(self, label: str) -> list[DirectedEdge]:
        return [e for e in self.edges if e.label == label]


# --------------------------------------------------------------------------
# member-level call graph and chains


def member_graph(model: ProgramModel) -> dict[Member, list[tuple[Member, CallOperation]]]:
    """Hops between members: calls and attribute uses, plus attribute-from-call flows.

    A method ``m`` of class ``c`` hops to every member it uses.  An attribute
    ``c.a`` hops to the member whose value some statement of ``c`` stores in it.
    """
    graph: dict[Member, set[tuple[Member, CallOperation]]] = {}
    for c in model.classes:
        for a in c.attributes:
            graph[(c.name, a.name)] = set()
        for m in c.methods:
            graph[(c.name, m.name)] = set()
    for c in model.classes:
        for s in c.statements():
            if s.call is None:
                continue
            op = CallOperation(c.name, s.call.target_class, s.call.target_member, s.call.member_kind)
            dst = (s.call.target_class, s.call.target_member)
            graph[(c.name, s.method)].add((dst, op))
            if s.assigns is not None:
                graph[(c.name, s.assigns)].add((dst, op))
    return {k: sorted(v, key=lambda h: (h[0], h[1].member_kind)) for k, v in sorted(graph.items())}


def _intraclass_run_ok(path: list[Member]) -> bool:
    """No two consecutive same-class hops at the path's tail."""
    if len(path) < 3:
        return True
    a, b, c = path[-3][0], path[-2][0], path[-1][0]
    return not (a == b == c)


def enumerate_chains(
    model: ProgramModel,
    max_len: int = DEFAULT_MAX_LEN,
    analysis: Optional[PathAnalysis] = None,
) -> list[TransitiveChain]:
    if max_len not in CHAIN_LENGTHS:
        raise ValueError(f"max chain length must be one of {CHAIN_LENGTHS}, got {max_len}")
    analysis = analysis or PathAnalysis(model)
    graph = member_graph(model)
    found: list[tuple[tuple[Member, ...], tuple[CallOperation, ...]]] = []

    def extend(path: list[Member], ops: list[CallOperation], on_path: set[Member]) -> None:
        if len(path) >= 3 and path[0][0] != path[-1][0]:
            found.append((tuple(path), tuple(ops)))
        if len(path) == max_len:
            return
        for nxt, op in graph[path[-1]]:
            if nxt in on_path:
                continue
            path.append(nxt)
            if _intraclass_run_ok(path):
                ops.append(op)
                on_path.add(nxt)
                extend(path, ops, on_path)
                on_path.discard(nxt)
                ops.pop()
            path.pop()

    for start in graph:
        extend([start], [], {start})

    chains = []
    for path, ops in sorted(found, key=lambda f: (f[0][0][0], f[0][-1][0], len(f[0]), f[0])):
        probs = tuple(analysis.call_operation_probability(op) for op in ops)
        chains.append(TransitiveChain(path, ops, probs, math.prod(probs)))
    return chains


def chain_probability(chain: TransitiveChain) -> float:
    return math.prod(chain.op_probabilities)


def control_complexity(chains: Iterable[TransitiveChain], pair: Optional[tuple[str, str]] = None) -> ControlComplexity:
    chains = tuple(chains)
    if pair is None:
        pair = chains[0].pair if chains else ("", "")
    if any(ch.pair != pair for ch in chains):
        raise ValueError(f"all chains must run from {pair[0]} to {pair[1]}")
    value = 1.0 - math.prod(1.0 - chain_probability(ch) for ch in chains) if chains else 0.0
    return ControlComplexity(pair, chains, value)


# --------------------------------------------------------------------------
# diagrams


def build_ord(model: ProgramModel) -> dict[tuple[str, str], set[str]]:
    """Direct dependencies as ``{(i, j): {kinds}}``."""
    kinds: dict[tuple[str, str], set[str]] = defaultdict(set)
    for c in model.classes:
        if c.extends is not None:
            kinds[(c.name, c.extends)].add("inheritance")
        for t in c.field_object_types:
            if t != c.name:
                kinds[(c.name, t)].add("aggregation")
    for site in model.call_sites():
        if site.caller_class != site.target_class:
            kinds[(site.caller_class, site.target_class)].add("association")
    return dict(sorted(kinds.items()))


def build_eord(
    model: ProgramModel,
    max_len: int = DEFAULT_MAX_LEN,
    weights: Weights = Weights(),
    transitive: bool = True,
    analysis: Optional[PathAnalysis] = None,
) -> Eord:
    """Assemble the diagram; ``transitive=False`` gives the plain ORD."""
    direct = build_ord(model)
    chains = enumerate_chains(model, max_len, analysis) if transitive else []
    by_pair: dict[tuple[str, str], list[TransitiveChain]] = defaultdict(list)
    for ch in chains:
        by_pair[ch.pair].append(ch)
    data = measure_data_coupling(model)
    pairs = sorted(set(direct) | set(by_pair))
    records = []
    for p in pairs:
        base = data.get(p, CouplingRecord(p[0], p[1]))
        t = control_complexity(by_pair[p], p).value if p in by_pair else 0.0
        records.append(CouplingRecord(p[0], p[1], base.attributes, base.methods, t))
    edges = []
    for rec in normalize(records):
        kinds = frozenset(direct.get(rec.pair, ()))
        if kinds and rec.pair in by_pair:
            label = "C"
        elif kinds:
            label = "D"
        else:
            label = "T"
        edges.append(DirectedEdge(rec.src, rec.dst, kinds, label, rec))
    nodes = tuple(sorted(c.name for c in model.classes))
    return Eord(nodes, tuple(edges), tuple(chains), weights, max_len)


# --------------------------------------------------------------------------
# statistics and export


def relationship_stats(eord: Eord) -> dict:
    total = len(eord.edges)
    counts = {lab: len(eord.labelled(lab)) for lab in ("D", "T", "C")}
    members = {m for ch in eord.chains for m in ch.member_path}
    classes = {c for c, _ in members}

    def frac(k: int, n: int) -> float:
        return k / n if n else 0.0

    return {
        "classes": len(eord.nodes),
        "edges": total,
        "direct": counts["D"],
        "transitive": counts["T"],
        "combination": counts["C"],
        "transitive_fraction": frac(counts["T"], total),
        "combination_fraction": frac(counts["C"], total),
        "with_transitive_fraction": frac(counts["T"] + counts["C"], total),
        "classes_in_chains": len(classes),
        "classes_in_chains_fraction": frac(len(classes), len(eord.nodes)),
        "members_in_chains": len(members),
        "chains": len(eord.chains),
    }


def eord_to_json(eord: Eord) -> dict:
    w = eord.weights
    return {
        "nodes": list(eord.nodes),
        "max_chain_len": eord.max_len,
        "edges": [
            {
                "from": e.src,
                "to": e.dst,
                "label": e.label,
                "kinds": sorted(e.direct_kinds),
                "A": e.coupling.attributes,
                "M": e.coupling.methods,
                "T": e.coupling.control,
                "A_norm": e.coupling.attributes_norm,
                "M_norm": e.coupling.methods_norm,
                "SCplx": e.scplx(w),
            }
            for e in eord.edges
        ],
        "chains": [
            {
                "path": [f"{c}.{m}" for c, m in ch.member_path],
                "pc": list(ch.op_probabilities),
                "t": ch.chain_probability,
            }
            for ch in eord.chains
        ],
    }


def eord_to_dot(eord: Eord) -> str:
    style = {"D": "solid", "T": "dashed", "C": "bold"}
    lines = ["digraph eord {", "  rankdir=LR;"]
    for n in eord.nodes:
        lines.append(f'  "{n}";')
    for e in eord.edges:
        label = f"{e.label} {e.scplx(eord.weights):.3f}"
        lines.append(f'  "{e.src}" -> "{e.dst}" [label="{label}", style={style[e.label]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps_eord(eord: Eord, fmt: str = "json") -> str:
    if fmt == "dot":
        return eord_to_dot(eord)
    return json.dumps(eord_to_json(eord), indent=2) + "\n"
