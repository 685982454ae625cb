"""Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cito.cfg import CallOperation, PathAnalysis, find_statement, predicate_probability  # noqa: E402
from cito.coupling import ocplx  # noqa: E402
from cito.eord import build_eord, control_complexity, enumerate_chains  # noqa: E402
from cito.frontend import lower, parse, parse_files, pretty  # noqa: E402
from cito.model import And, Comparison, Or, load_pmif, save_pmif  # noqa: E402
from cito.orders import enumerate_cycles, graph_based, multilevel_feedback, ria, tarjan_scc  # noqa: E402
from cito.orders.graphs import is_nontrivial  # noqa: E402
from cito.samples import abc_paths  # noqa: E402
from cito.stats import wilcoxon_signed_rank  # noqa: E402
from cito.synth import SynthSpec, generate_program, generate_synthetic  # noqa: E402

from oracles import brute_force_chains, order_cost, permutation_minimum, sign_enumeration_p  # noqa: E402


class Check:
    def __init__(self):
        self.failures: list[str] = []

    def that(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def equal(self, got, want, what: str) -> None:
        self.that(got == want, f"{what}: got {got!r}, want {want!r}")

    def close(self, got: float, want: float, tol: float, what: str) -> None:
        self.that(abs(got - want) <= tol, f"{what}: got {got!r}, want {want!r} (tol {tol})")


def _abc_model():
    return lower(parse_files(abc_paths()), name="abc")


def criterion_1(c: Check) -> str:
    m = _abc_model()
    an = PathAnalysis(m)
    for cls, line, p in [("A", 8, 0.25), ("A", 12, 0.5), ("B", 6, 0.5), ("B", 12, 1.0)]:
        c.equal(an.statement_probability(find_statement(m, cls, line)).probability, p, f"p({cls} line {line})")
    c.equal(an.call_operation_probability(CallOperation("A", "B", "methodB1")), 0.625, "pc(A->B.methodB1)")
    chains = enumerate_chains(m, 3, an)
    c.equal(sorted(ch.chain_probability for ch in chains), [0.3125, 0.75], "chain probabilities")
    t = control_complexity(chains, ("A", "C")).value
    c.equal(t, 0.828125, "T(A,C)")
    return f"T(A,C)={t}"


def criterion_2(c: Check) -> str:
    m = _abc_model()
    direct = build_eord(m, transitive=False)
    o1 = graph_based(direct)
    c.equal(list(o1.sequence), ["A", "C", "B"], "order on direct diagram")
    c.equal(ocplx(direct, o1).stubs, 1, "stubs on direct diagram")
    full = build_eord(m)
    o2 = graph_based(full)
    removed = {tuple(e) for e in o2.metadata["removed_edges"]}
    c.equal(list(o2.sequence), ["C", "B", "A"], "order on extended diagram")
    c.that(removed in ({("B", "A"), ("C", "A")}, {("B", "A"), ("A", "C")}), f"removed edges {sorted(removed)}")
    return f"direct {','.join(o1.sequence)}; extended {','.join(o2.sequence)} removing {sorted(removed)}"


def criterion_3(c: Check) -> str:
    m = _abc_model()
    n_direct = len(enumerate_cycles(build_eord(m, transitive=False).successors()))
    n_full = len(enumerate_cycles(build_eord(m).successors()))
    c.equal(n_direct, 2, "cycles without transitive edge")
    c.equal(n_full, 3, "cycles with transitive edge")
    return f"{n_direct} and {n_full} cycles"


def criterion_4(c: Check) -> str:
    c.equal(predicate_probability(Comparison("is", "==", True)), 0.5, "single comparison")
    c.equal(predicate_probability(And((Comparison("x", ">", 2), Comparison("y", "<", 7)))), 0.25, "x>2 && y<7")
    c.equal(predicate_probability(Or((Comparison("x", "<", 3), Comparison("y", ">", 6)))), 0.75, "x<3 || y>6")
    c.equal(predicate_probability(And((Comparison("x", ">", 5), Comparison("x", "<", 3)))), 0.0, "x>5 && x<3")
    for n in range(1, 11):
        leaves = tuple(Comparison(f"v{k}", ">", k) for k in range(n))
        c.close(predicate_probability(And(leaves)), 1 / 2 ** n, 1e-12, f"AND of {n}")
        c.close(predicate_probability(Or(leaves)), 1 - 1 / 2 ** n, 1e-12, f"OR of {n}")
    return "4 worked predicates, N=1..10"


def criterion_5(c: Check) -> str:
    ratios = []
    dags = 0
    for k in range(200):
        spec = SynthSpec(classes=1 + k % 8, edge_density=(0.0, 0.15, 0.3, 0.45)[k % 4], seed=1000 + k)
        m = generate_synthetic(spec)
        an = PathAnalysis(m)
        got = {ch.member_path for ch in enumerate_chains(m, 3, an)}
        c.equal(got, brute_force_chains(m, 3), f"chains of model {k}")
        e = build_eord(m, analysis=an)
        best = permutation_minimum(e, e.weights)
        for o in (graph_based(e), multilevel_feedback(e), ria(e, seed=k, iterations=300)):
            cost = ocplx(e, o).ocplx
            c.close(cost, order_cost(e, e.weights, o.sequence), 1e-9, f"ocplx {o.strategy} model {k}")
            c.that(cost >= best - 1e-9, f"{o.strategy} below minimum on model {k}")
            if best > 0:
                ratios.append(cost / best)
        succ = e.successors()
        if all(not is_nontrivial(comp, succ) for comp in tarjan_scc(succ)):
            dags += 1
            c.equal(ocplx(e, multilevel_feedback(e)).ocplx, 0.0, f"feedback on DAG model {k}")
    c.that(dags > 0, "no acyclic models sampled")
    mean_ratio = sum(ratios) / len(ratios) if ratios else 1.0
    return f"{dags} DAGs; mean cost/minimum ratio {mean_ratio:.3f}"


def criterion_6(c: Check) -> str:
    e = build_eord(_abc_model())
    best = permutation_minimum(e, e.weights)
    for seed in range(50):
        a = ria(e, seed=seed, iterations=500, trace=True)
        b = ria(e, seed=seed, iterations=500, trace=True)
        c.equal(json.dumps(a.sequence), json.dumps(b.sequence), f"repeat seed {seed}")
        costs = a.metadata["accepted_costs"]
        c.that(all(y <= x for x, y in zip(costs, costs[1:])), f"accepted costs rise for seed {seed}")
        c.close(ocplx(e, a).ocplx, best, 1e-12, f"final cost seed {seed}")
    for k in range(20):
        big = build_eord(generate_synthetic(SynthSpec(classes=12, edge_density=0.15, seed=k)))
        a, b = ria(big, seed=k, iterations=400, trace=True), ria(big, seed=k, iterations=400, trace=True)
        c.equal(a.sequence, b.sequence, f"repeat on synthetic model {k}")
        costs = a.metadata["accepted_costs"]
        c.that(all(y <= x for x, y in zip(costs, costs[1:])), f"accepted costs rise on synthetic model {k}")
    return f"50 seeds reach the minimum {best:.6f}"


def criterion_7(c: Check) -> str:
    grew = 0
    for k in range(50):
        m = generate_synthetic(SynthSpec(classes=3 + k % 6, edge_density=0.4, seed=500 + k))
        an = PathAnalysis(m)
        short = {ch.member_path for ch in enumerate_chains(m, 3, an)}
        long_ = {ch.member_path for ch in enumerate_chains(m, 5, an)}
        c.that(short <= long_, f"model {k}: length-3 chains missing at length 5")
        grew += len(long_) > len(short)
    return f"{grew}/50 models gain chains at length 5"


def criterion_8(c: Check) -> str:
    rng = random.Random(8)
    cases = 0
    for _ in range(400):
        n = rng.randint(1, 12)
        diffs = [rng.choice([-3, -2, -1, 0, 1, 2, 3]) * rng.choice([1, 1, 2]) for _ in range(n)]
        r = wilcoxon_signed_rank(diffs)
        if r.p_value is None:
            c.that(all(d == 0 for d in diffs), "missing p-value")
            continue
        cases += 1
        c.close(r.p_value, sign_enumeration_p(diffs), 1e-12, f"p for {diffs}")
        c.equal(r.reject, r.p_value < 0.05, f"decision for {diffs}")
    c.equal(wilcoxon_signed_rank([1, 2, 3, 4, 5]).p_value, 0.0625, "p for +1..+5")
    c.equal(wilcoxon_signed_rank([1, 2, 3, 4, 5]).decision, "retain", "decision at p=0.0625")
    c.equal(wilcoxon_signed_rank([1, 2, 3, 4, 5, 6]).decision, "reject", "decision at p=0.03125")
    return f"{cases} exact cases checked"


def criterion_9(c: Check) -> str:
    for k in range(500):
        spec = SynthSpec(classes=1 + k % 8, edge_density=(k % 5) / 5, branch_density=(k % 3) / 2, seed=k)
        prog = generate_program(spec)
        text = pretty(prog)
        parsed = parse(text)
        c.that(parsed == prog, f"parse(print) differs for seed {k}")
        c.that(pretty(parsed) == text, f"print(parse(print)) differs for seed {k}")
        m = lower(parsed, name=f"s{k}")
        data = save_pmif(m)
        back = load_pmif(data)
        c.that(back == m, f"PMIF model differs for seed {k}")
        c.that(save_pmif(back) == data, f"PMIF bytes differ for seed {k}")
    return "500 + 500 instances"


CRITERIA = [
    (1, "sample program golden values", criterion_1, 1.0),
    (2, "graph-based orders on the sample", criterion_2, 1.0),
    (3, "cycle counts", criterion_3, None),
    (4, "predicate rules", criterion_4, None),
    (5, "oracle equivalence on 200 models", criterion_5, 60.0),
    (6, "random iterative search determinism and descent", criterion_6, None),
    (7, "chain superset property", criterion_7, None),
    (8, "Wilcoxon signed-rank", criterion_8, None),
    (9, "PMIF and print/parse round trips", criterion_9, 30.0),
]


def evaluate(number: int) -> tuple[bool, str]:
    _, name, fn, limit = CRITERIA[number - 1]
    check = Check()
    start = time.perf_counter()
    try:
        detail = fn(check)
    except Exception as e:  # report, don't crash the gate
        check.failures.append(f"{type(e).__name__}: {e}")
        detail = "raised"
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed >= limit:
        check.failures.append(f"took {elapsed:.2f}s, limit {limit}s")
    ok = not check.failures
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} ({elapsed:.2f}s) {detail}"
    if not ok:
        line += "\n    " + "\n    ".join(check.failures[:10])
    return ok, line


@pytest.mark.parametrize("number", [n for n, *_ in CRITERIA])
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n, *_ in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
