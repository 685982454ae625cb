"""Directed-graph algorithms used by the order strategies."""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

Node = Hashable
Graph = Mapping[Node, Iterable[Node]]

DEFAULT_CYCLE_CAP = 1_000_000


class CycleLimitError(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"more than {cap} elementary cycles; raise the cycle cap (--cycle-cap) to continue")
        self.cap = cap


def tarjan_scc(graph: Graph) -> list[list[Node]]:
    """Strongly connected components, iteratively (no recursion limit).

    Components come out in reverse topological order of the condensation;
    each component's members are sorted.
    """
    index: dict[Node, int] = {}
    low: dict[Node, int] = {}
    on_stack: set[Node] = set()
    stack: list[Node] = []
    out: list[list[Node]] = []
    counter = 0
    succ = {v: sorted(graph.get(v, ())) for v in graph}

    for root in sorted(graph):
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, i = work[-1]
            nbrs = succ.get(v, [])
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def is_nontrivial(component: Sequence[Node], graph: Graph) -> bool:
    if len(component) > 1:
        return True
    v = component[0]
    return v in set(graph.get(v, ()))


@dataclass
class CycleSet:
    cycles: list[tuple[Node, ...]] = field(default_factory=list)
    edge_counts: Counter = field(default_factory=Counter)

    def __len__(self) -> int:
        return len(self.cycles)

    def add(self, cycle: tuple[Node, ...]) -> None:
        self.cycles.append(cycle)
        for k in range(len(cycle)):
            self.edge_counts[(cycle[k], cycle[(k + 1) % len(cycle)])] += 1


def enumerate_cycles(graph: Graph, cap: int = DEFAULT_CYCLE_CAP) -> CycleSet:
    """All elementary cycles (Johnson's algorithm), each rotated to start at its least node.

    Cycles are listed sorted; ``edge_counts`` maps each edge to the number of
    cycles through it.  Raises :class:`CycleLimitError` past ``cap`` cycles.
    """
    succ = {v: sorted(set(graph.get(v, ()))) for v in graph}
    for v in list(succ):
        for w in succ[v]:
            succ.setdefault(w, [])
    found: list[tuple[Node, ...]] = []
    order = sorted(succ)
    for i, start in enumerate(order):
        allowed = set(order[i:])
        sub = {v: [w for w in succ[v] if w in allowed] for v in allowed}
        comp = next((c for c in tarjan_scc(sub) if start in c), [start])
        if not is_nontrivial(comp, sub):
            continue
        comp_set = set(comp)
        _johnson_circuits(start, {v: [w for w in sub[v] if w in comp_set] for v in comp_set}, found, cap)
    result = CycleSet()
    for cyc in sorted(found):
        result.add(cyc)
    return result


def _johnson_circuits(start: Node, adj: dict, found: list, cap: int) -> None:
    blocked: set[Node] = set()
    blocked_by: dict[Node, set[Node]] = {v: set() for v in adj}
    path = [start]
    blocked.add(start)
    stack = [(start, iter(adj[start]))]
    closed = [False]

    def unblock(u: Node) -> None:
        pending = [u]
        while pending:
            x = pending.pop()
            if x in blocked:
                blocked.discard(x)
                pending.extend(blocked_by[x])
                blocked_by[x].clear()

    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if w == start:
                found.append(tuple(path))
                if len(found) > cap:
                    raise CycleLimitError(cap)
                closed[-1] = True
            elif w not in blocked:
                path.append(w)
                blocked.add(w)
                closed.append(False)
                stack.append((w, iter(adj[w])))
                advanced = True
                break
        if advanced:
            continue
        stack.pop()
        path.pop()
        did_close = closed.pop()
        if did_close:
            unblock(v)
        else:
            for w in adj[v]:
                blocked_by[w].add(v)
        if closed:
            closed[-1] = closed[-1] or did_close


def topological_order(nodes: Iterable[Node], depends_on: Graph) -> list[Node]:
    """Dependencies first, least node first among ready ones.

    ``depends_on[v]`` lists what ``v`` needs.  Raises ``ValueError`` on a cycle.
    """
    nodes = sorted(nodes)
    missing = {v: set(depends_on.get(v, ())) & set(nodes) for v in nodes}
    dependents: dict[Node, list[Node]] = {v: [] for v in nodes}
    for v, deps in missing.items():
        for d in deps:
            dependents[d].append(v)
    ready = [v for v in nodes if not missing[v]]
    heapq.heapify(ready)
    out = []
    while ready:
        v = heapq.heappop(ready)
        out.append(v)
        for u in dependents[v]:
            missing[u].discard(v)
            if not missing[u]:
                heapq.heappush(ready, u)
    if len(out) != len(nodes):
        raise ValueError("graph has a cycle; no topological order")
    return out
