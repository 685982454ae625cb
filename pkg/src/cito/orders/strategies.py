"""Strategies that turn a dependency diagram into a class integration test order."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

from ..coupling import Weights, ocplx
from ..eord import DirectedEdge, Eord
from .graphs import (
    DEFAULT_CYCLE_CAP,
    CycleLimitError,
    enumerate_cycles,
    is_nontrivial,
    tarjan_scc,
    topological_order,
)

STRATEGIES = ("graph", "feedback", "ria")
RATIO_TOL = 1e-9


class StuckCycleError(RuntimeError):
    """Cycles remain but every edge on them is protected from removal."""

    def __init__(self, cycle: tuple[str, ...]):
        path = " -> ".join(cycle + cycle[:1])
        super().__init__(f"cycle {path} has only protected edges; rerun with --break-any")
        self.cycle = cycle


@dataclass(frozen=True)
class TestOrder:
    __test__ = False  # not a pytest class

    sequence: tuple[str, ...]
    strategy: str
    metadata: dict = field(default_factory=dict, compare=False)

    def __iter__(self):
        return iter(self.sequence)

    def __len__(self) -> int:
        return len(self.sequence)


def is_protected(edge: DirectedEdge) -> bool:
    """Inheritance edges, and aggregation edges carrying no use of the target, stay put."""
    kinds = edge.direct_kinds
    if "inheritance" in kinds:
        return True
    return "aggregation" in kinds and "association" not in kinds and edge.label != "C"


def _weights(eord: Eord, w: Optional[Weights]) -> Weights:
    return w if w is not None else eord.weights


def _ratio_key(count: int, weight: float) -> float:
    return math.inf if weight == 0 else count / weight


def _better(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a > b
    return a > b and not math.isclose(a, b, rel_tol=RATIO_TOL, abs_tol=0.0)


# --------------------------------------------------------------------------
# graph-based cycle breaking


def graph_based(
    eord: Eord,
    w: Optional[Weights] = None,
    break_any: bool = False,
    cycle_cap: int = DEFAULT_CYCLE_CAP,
) -> TestOrder:
    """Break cycles by repeatedly removing the edge with the best cycles-per-cost ratio.

    Removing an edge deletes exactly the cycles through it, so the cycle list
    is enumerated once and then pruned.  Ties go to the least ``(from, to)``.
    """
    w = _weights(eord, w)
    succ = eord.successors()
    cycles = []
    for comp in tarjan_scc(succ):
        if not is_nontrivial(comp, succ):
            continue
        members = set(comp)
        sub = {v: [x for x in succ[v] if x in members] for v in comp}
        try:
            cycles.extend(enumerate_cycles(sub, cycle_cap - len(cycles)).cycles)
        except CycleLimitError:
            raise CycleLimitError(cycle_cap) from None
    cycles.sort()

    cycle_edges = [[(c[k], c[(k + 1) % len(c)]) for k in range(len(c))] for c in cycles]
    through: dict[tuple[str, str], list[int]] = {}
    for idx, edges in enumerate(cycle_edges):
        for e in edges:
            through.setdefault(e, []).append(idx)
    count = {e: len(ix) for e, ix in through.items()}
    alive = [True] * len(cycles)
    n_alive = len(cycles)
    removable = {e.pair for e in eord.edges if break_any or not is_protected(e)}
    cost = {e.pair: e.scplx(w) for e in eord.edges}

    removed: list[tuple[str, str]] = []
    while n_alive:
        best, best_ratio = None, -1.0
        for e in sorted(count):
            if count[e] == 0 or e not in removable:
                continue
            r = _ratio_key(count[e], cost[e])
            if best is None or _better(r, best_ratio):
                best, best_ratio = e, r
        if best is None:
            stuck = next(cycles[i] for i in range(len(cycles)) if alive[i])
            raise StuckCycleError(tuple(stuck))
        removed.append(best)
        for idx in through[best]:
            if not alive[idx]:
                continue
            alive[idx] = False
            n_alive -= 1
            for e in cycle_edges[idx]:
                count[e] -= 1

    gone = set(removed)
    depends_on: dict[str, list[str]] = {n: [] for n in eord.nodes}
    for e in eord.edges:
        if e.pair not in gone:
            depends_on[e.src].append(e.dst)
    order = topological_order(eord.nodes, depends_on)
    meta = {"removed_edges": [list(e) for e in removed], "cycles": len(cycles), "iterations": len(removed)}
    return TestOrder(tuple(order), "graph", meta)


# --------------------------------------------------------------------------
# multilevel feedback


@dataclass
class PriorityState:
    testing_cost: dict[str, float]
    test_profit: dict[str, float]
    integrated: list[str] = field(default_factory=list)

    @property
    def priority(self) -> dict[str, float]:
        return {c: self.test_profit[c] - self.testing_cost[c] for c in self.testing_cost}

    @property
    def remaining(self) -> list[str]:
        return sorted(self.testing_cost)


def _priority_state(eord: Eord, w: Weights, remaining: set[str], integrated: list[str]) -> PriorityState:
    cost = {c: [] for c in remaining}
    profit = {c: [] for c in remaining}
    for e in eord.edges:
        if e.src in remaining and e.dst in remaining:
            s = e.scplx(w)
            cost[e.src].append(s)
            profit[e.dst].append(s)
    return PriorityState(
        {c: math.fsum(v) for c, v in cost.items()},
        {c: math.fsum(v) for c, v in profit.items()},
        list(integrated),
    )


def multilevel_feedback(eord: Eord, w: Optional[Weights] = None) -> TestOrder:
    """Integrate classes one round at a time by net benefit (profit minus cost).

    Every class that needs no stubs is integrated as soon as it appears;
    otherwise the single class with the highest priority goes next.  Costs and
    profits are recomputed over the unintegrated classes after each round.
    """
    w = _weights(eord, w)
    remaining = set(eord.nodes)
    order: list[str] = []
    rounds = []
    while remaining:
        state = _priority_state(eord, w, remaining, order)
        free = [c for c in state.remaining if state.testing_cost[c] == 0]
        if free:
            chosen = free
        else:
            prio = state.priority
            top = None
            for c in state.remaining:
                if top is None or _better(prio[c], prio[top]):
                    top = c
            chosen = [top]
        rounds.append({
            "integrated": chosen,
            "priority": {c: state.priority[c] for c in chosen},
        })
        order.extend(chosen)
        remaining.difference_update(chosen)
    return TestOrder(tuple(order), "feedback", {"rounds": rounds, "iterations": len(rounds)})


# --------------------------------------------------------------------------
# random iterative search


def ria(
    eord: Eord,
    w: Optional[Weights] = None,
    seed: int = 0,
    iterations: int = 1000,
    sa_temp: Optional[float] = None,
    cooling: float = 0.995,
    trace: bool = False,
) -> TestOrder:
    """Adjacent-swap local search from a seeded random permutation.

    A swap is kept when it does not raise the order's cost.  With ``sa_temp``
    set, worse swaps are also kept with probability ``exp(-delta / temp)``,
    the temperature shrinking by ``cooling`` each step.  Returns the best
    order seen.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    w = _weights(eord, w)
    rng = random.Random(seed)
    nodes = sorted(eord.nodes)
    order = rng.sample(nodes, len(nodes))
    weight = {e.pair: e.scplx(w) for e in eord.edges}

    def stub(i: str, j: str) -> float:
        return weight.get((i, j), 0.0)

    current = ocplx(eord, order, w).ocplx
    best, best_cost = list(order), current
    accepted = [current] if trace else None
    temp = sa_temp
    for _ in range(iterations if len(order) > 1 else 0):
        k = rng.randrange(len(order) - 1)
        x, y = order[k], order[k + 1]
        before, after = stub(x, y), stub(y, x)
        if after <= before:
            take = True
        elif temp:
            take = rng.random() < math.exp(-(after - before) / temp)
        else:
            take = False
        if temp:
            temp *= cooling
        if not take:
            continue
        order[k], order[k + 1] = y, x
        current += after - before
        if accepted is not None:
            accepted.append(current)
        if current < best_cost:
            best, best_cost = list(order), current
    if sa_temp is None:
        best = order  # accepted costs never rise, so the last order is a best one
    meta = {"seed": seed, "iterations": iterations}
    if sa_temp is not None:
        meta["sa_temp"] = sa_temp
    if accepted is not None:
        meta["accepted_costs"] = accepted
    return TestOrder(tuple(best), "ria", meta)


# --------------------------------------------------------------------------


def exhaustive_minimum(eord: Eord, w: Optional[Weights] = None) -> tuple[float, tuple[str, ...]]:
    """Least cost over all orders, by dynamic programming over placed subsets.

    Placing class ``c`` after set ``S`` stubs every dependency of ``c`` not yet
    placed.  Exponential in the class count; meant for small diagrams.
    """
    w = _weights(eord, w)
    nodes = sorted(eord.nodes)
    n = len(nodes)
    if n > 20:
        raise ValueError("exhaustive search is limited to 20 classes")
    idx = {c: i for i, c in enumerate(nodes)}
    out_edges: list[list[tuple[int, float]]] = [[] for _ in nodes]
    for e in eord.edges:
        out_edges[idx[e.src]].append((idx[e.dst], e.scplx(w)))
    full = (1 << n) - 1
    best = [math.inf] * (1 << n)
    back = [-1] * (1 << n)
    best[0] = 0.0
    for placed in range(1 << n):
        base = best[placed]
        if base == math.inf:
            continue
        for c in range(n):
            bit = 1 << c
            if placed & bit:
                continue
            add = sum(s for j, s in out_edges[c] if not (placed | bit) & (1 << j))
            nxt = placed | bit
            if base + add < best[nxt]:
                best[nxt] = base + add
                back[nxt] = c
    seq = []
    state = full
    while state:
        c = back[state]
        seq.append(nodes[c])
        state &= ~(1 << c)
    return best[full], tuple(reversed(seq))


def run_strategy(
    name: str,
    eord: Eord,
    w: Optional[Weights] = None,
    *,
    break_any: bool = False,
    cycle_cap: int = DEFAULT_CYCLE_CAP,
    seed: int = 0,
    iterations: int = 1000,
    sa_temp: Optional[float] = None,
) -> TestOrder:
    if name == "graph":
        return graph_based(eord, w, break_any=break_any, cycle_cap=cycle_cap)
    if name == "feedback":
        return multilevel_feedback(eord, w)
    if name == "ria":
        return ria(eord, w, seed=seed, iterations=iterations, sa_temp=sa_temp)
    raise ValueError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")
