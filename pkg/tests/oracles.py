"""Independent reference computations used to cross-check the library.

Each oracle takes a deliberately different route from the code under test:
full path or permutation enumeration instead of reachability tricks, dynamic
programming or pruned search.
"""

from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np

from cito.model import ProgramModel


def path_condition_edges(cfg, block: int) -> set[tuple[int, str]]:
    """Branch edges common to every simple entry-to-block path, as (branch block, edge kind)."""
    g = nx.MultiDiGraph()
    g.add_nodes_from(b.id for b in cfg.blocks)
    for e in cfg.edges:
        g.add_edge(e.src, e.dst, key=(e.src, e.kind, e.dst))
    branching = {b.id for b in cfg.blocks if b.branch is not None}
    if block == cfg.entry:
        return set()
    common = None
    for path in nx.all_simple_edge_paths(g, cfg.entry, block):
        edges = {(src, key[1]) for src, _, key in path if src in branching}
        common = edges if common is None else common & edges
    return common or set()


def conjunct_edge(c) -> tuple[int, str]:
    kind = {"true": "branch-true", "false": "branch-false", "loop-body": "loop-body", "loop-exit": "loop-exit"}
    if c.branch_kind == "switch":
        return (c.block, f"case({c.arm})")
    return (c.block, kind[c.outcome])


def member_hops(model: ProgramModel) -> nx.DiGraph:
    g = nx.DiGraph()
    for c in model.classes:
        for a in c.attributes:
            g.add_node((c.name, a.name))
        for m in c.methods:
            g.add_node((c.name, m.name))
    for s in model.statements():
        if s.call is None:
            continue
        dst = (s.call.target_class, s.call.target_member)
        g.add_edge((s.cls, s.method), dst)
        if s.assigns is not None:
            g.add_edge((s.cls, s.assigns), dst)
    return g


def brute_force_chains(model: ProgramModel, max_len: int) -> set[tuple]:
    g = member_hops(model)
    found = set()
    nodes = sorted(g.nodes)
    for src in nodes:
        for dst in nodes:
            if src == dst or src[0] == dst[0]:
                continue
            for path in nx.all_simple_paths(g, src, dst, cutoff=max_len - 1):
                if len(path) < 3:
                    continue
                classes = [m[0] for m in path]
                if any(classes[k] == classes[k + 1] == classes[k + 2] for k in range(len(path) - 2)):
                    continue
                found.add(tuple(path))
    return found


def stub_matrix(eord, weights) -> tuple[list[str], np.ndarray]:
    """Stub cost matrix rebuilt from raw counts and control values."""
    nodes = sorted(eord.nodes)
    idx = {c: i for i, c in enumerate(nodes)}
    max_a = max((e.coupling.attributes for e in eord.edges), default=0) or 1
    max_m = max((e.coupling.methods for e in eord.edges), default=0) or 1
    wa, wm, wt = weights.as_tuple()
    s = np.zeros((len(nodes), len(nodes)))
    for e in eord.edges:
        a = e.coupling.attributes / max_a
        m = e.coupling.methods / max_m
        s[idx[e.src], idx[e.dst]] = math.sqrt(wa * a * a + wm * m * m + wt * e.coupling.control ** 2)
    return nodes, s


def order_cost(eord, weights, order) -> float:
    nodes, s = stub_matrix(eord, weights)
    pos = np.array([list(order).index(c) for c in nodes])
    mask = pos[:, None] < pos[None, :]
    return float((s * mask).sum())


def permutation_minimum(eord, weights) -> float:
    """Least cost over all orders by vectorised enumeration."""
    nodes, s = stub_matrix(eord, weights)
    n = len(nodes)
    if n <= 1:
        return 0.0
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
    pos = np.argsort(perms, axis=1)
    src, dst = np.nonzero(s)
    if len(src) == 0:
        return 0.0
    stubbed = pos[:, src] < pos[:, dst]
    return float((stubbed * s[src, dst]).sum(axis=1).min())


def sign_enumeration_p(diffs) -> float:
    """Two-sided exact Wilcoxon p-value by listing every sign assignment."""
    d = [v for v in diffs if v != 0]
    n = len(d)
    mags = sorted(abs(v) for v in d)
    ranks = {}
    for v in set(mags):
        first = mags.index(v) + 1
        last = len(mags) - mags[::-1].index(v)
        ranks[v] = (first + last) / 2
    r = [ranks[abs(v)] for v in d]
    observed = sum(rk for rk, v in zip(r, d) if v > 0)
    mean = sum(r) / 2
    dev = abs(observed - mean)
    hits = 0
    for signs in itertools.product((0, 1), repeat=n):
        w = sum(rk for rk, sgn in zip(r, signs) if sgn)
        if abs(w - mean) >= dev - 1e-9:
            hits += 1
    return hits / 2 ** n
