"""Path conditions and execution probabilities of call operations.

A statement's path condition is the list of branch outcomes that every
entry-to-statement path in its method's CFG must take.  Its probability uses
the static rules for branch predicates: a simple comparison holds with
probability 1/2, conjunctions multiply, disjunctions take the complement of
the product of complements, provably contradictory conjunctions get 0, a
switch arm among N gets 1/N and loop bodies get 1.  A call operation (a
member of one class used from another class) executes unless none of its
statements do, giving ``pc = 1 - prod(1 - p_s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .model import (
    And,
    BranchStmt,
    CallTarget,
    Cfg,
    CfgEdge,
    Comparison,
    ModelError,
    Not,
    Opaque,
    Or,
    Predicate,
    ProgramModel,
    Statement,
    format_predicate,
    parse_case_kind,
)

_NEGATE = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}


@dataclass(frozen=True)
class CallOperation:
    source_class: str
    target_class: str
    target_member: str
    member_kind: str = "method"

    @property
    def target(self) -> CallTarget:
        return CallTarget(self.target_class, self.target_member, self.member_kind)

    def __str__(self) -> str:
        return f"{self.source_class} -> {self.target_class}.{self.target_member}"


@dataclass(frozen=True)
class Conjunct:
    predicate: Optional[Predicate]  # None for switch arms
    branch_kind: str
    outcome: str  # true | false | case | loop-body | loop-exit
    block: int
    arm: Optional[int] = None
    arms: Optional[int] = None

    def describe(self) -> str:
        if self.branch_kind == "switch":
            return f"switch arm {self.arm} of {self.arms}"
        text = format_predicate(self.predicate)
        if self.outcome == "false":
            return f"!({text})"
        if self.outcome in ("loop-body", "loop-exit"):
            return f"{self.branch_kind} {self.outcome}: {text}"
        return text


PathCondition = tuple[Conjunct, ...]


@dataclass(frozen=True)
class StmtProbability:
    statement: Statement
    path_condition: PathCondition
    probability: float


# --------------------------------------------------------------------------
# statement extraction and path conditions


def extract_statements(model: ProgramModel, op: CallOperation) -> list[Statement]:
    src = model.cls(op.source_class)
    target = model.cls(op.target_class)
    if not target.has_member(op.target_member, op.member_kind):
        raise ModelError(f"{op.target_class} has no {op.member_kind} {op.target_member!r}")
    return [s for s in src.statements() if s.call is not None and s.call.target == op.target]


def _edge_outcome(edge: CfgEdge, branch: BranchStmt, block: int) -> Conjunct:
    if branch.kind == "switch":
        return Conjunct(None, "switch", "case", block, parse_case_kind(edge.kind), branch.arms)
    outcome = {
        "branch-true": "true",
        "branch-false": "false",
        "loop-body": "loop-body",
        "loop-exit": "loop-exit",
    }[edge.kind]
    return Conjunct(branch.predicate, branch.kind, outcome, block)


def _block_path_conditions(cfg: Cfg) -> dict[int, PathCondition]:
    """Branch edges lying on every entry-to-block path, in path order."""
    branch_edges = [e for e in cfg.edges if cfg.block_map[e.src].branch is not None]
    reach = cfg.reachable()
    required: dict[int, list[CfgEdge]] = {b: [] for b in reach}
    for e in branch_edges:
        for b in reach - cfg.reachable(skip=e):
            required[b].append(e)
    # every required edge lies on any path to the block, so a BFS tree path fixes the order
    parent: dict[int, Optional[CfgEdge]] = {cfg.entry: None}
    queue = [cfg.entry]
    for b in queue:
        for e in cfg.successors[b]:
            if e.dst not in parent:
                parent[e.dst] = e
                queue.append(e.dst)
    out: dict[int, PathCondition] = {}
    for b, edges in required.items():
        path: list[CfgEdge] = []
        cur = b
        while parent[cur] is not None:
            path.append(parent[cur])
            cur = parent[cur].src
        path.reverse()
        rank = {id(e): i for i, e in enumerate(path)}
        ordered = sorted(edges, key=lambda e: rank[id(e)])
        out[b] = tuple(_edge_outcome(e, cfg.block_map[e.src].branch, e.src) for e in ordered)
    return out


# --------------------------------------------------------------------------
# predicate probability


def _forced_literals(pred: Predicate, want: bool = True) -> list[Comparison]:
    """Comparisons that must hold whenever ``pred`` evaluates to ``want``."""
    if isinstance(pred, Comparison):
        return [pred if want else Comparison(pred.var, _NEGATE[pred.cmp], pred.rhs)]
    if isinstance(pred, Not):
        return _forced_literals(pred.arg, not want)
    if isinstance(pred, And) and want:
        return [lit for a in pred.args for lit in _forced_literals(a, True)]
    if isinstance(pred, Or) and not want:
        return [lit for a in pred.args for lit in _forced_literals(a, False)]
    return []


def _numeric(v) -> Optional[float]:
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, (int, float)):
        return float(v)
    return None


def contradictory(literals: list[Comparison]) -> bool:
    """True when the constant comparisons on some variable admit no real value."""
    by_var: dict[str, list[tuple[str, float]]] = {}
    for lit in literals:
        c = _numeric(lit.rhs)
        if c is not None:
            by_var.setdefault(lit.var, []).append((lit.cmp, c))
    for lits in by_var.values():
        lo, lo_strict = -math.inf, True
        hi, hi_strict = math.inf, True
        eq: set[float] = set()
        ne: set[float] = set()
        for cmp, c in lits:
            if cmp in (">", ">="):
                strict = cmp == ">"
                if c > lo or (c == lo and strict):
                    lo, lo_strict = c, strict
            elif cmp in ("<", "<="):
                strict = cmp == "<"
                if c < hi or (c == hi and strict):
                    hi, hi_strict = c, strict
            elif cmp == "==":
                eq.add(c)
            else:
                ne.add(c)
        if len(eq) > 1:
            return True
        if eq:
            (v,) = eq
            if v in ne or v < lo or v > hi or (v == lo and lo_strict) or (v == hi and hi_strict):
                return True
            continue
        if lo > hi or (lo == hi and (lo_strict or hi_strict or lo in ne)):
            return True
    return False


AtomProbability = Callable[[Opaque], Optional[float]]


def _probability(pred: Predicate, atom: Optional[AtomProbability]) -> float:
    if isinstance(pred, Comparison):
        return 0.5
    if isinstance(pred, Opaque):
        p = atom(pred) if atom is not None else None
        return 0.5 if p is None else p
    if isinstance(pred, Not):
        return 1.0 - _probability(pred.arg, atom)
    if isinstance(pred, And):
        if contradictory(_forced_literals(pred)):
            return 0.0
        return math.prod(_probability(a, atom) for a in pred.args)
    if isinstance(pred, Or):
        return 1.0 - math.prod(1.0 - _probability(a, atom) for a in pred.args)
    raise TypeError(f"not a predicate: {pred!r}")


def predicate_probability(
    pred: Optional[Predicate],
    outcome: Union[str, bool] = "true",
    branch_kind: str = "if",
    arms: Optional[int] = None,
    atom: Optional[AtomProbability] = None,
) -> float:
    """Probability that a branch takes ``outcome`` under the static rules."""
    if outcome is True:
        outcome = "true"
    elif outcome is False:
        outcome = "false"
    if branch_kind == "switch" or outcome == "case":
        if not arms or arms < 1:
            raise ValueError("switch outcome needs a positive arm count")
        return 1.0 / arms
    if outcome in ("loop-body", "loop-exit") or branch_kind in ("while", "for"):
        return 1.0
    if outcome == "true":
        return _probability(pred, atom)
    if outcome == "false":
        return 1.0 - _probability(pred, atom)
    raise ValueError(f"unknown outcome {outcome!r}")


def _conjunct_literals(c: Conjunct) -> list[Comparison]:
    if c.predicate is None or c.outcome not in ("true", "false"):
        return []
    return _forced_literals(c.predicate, c.outcome == "true")


# --------------------------------------------------------------------------
# analysis object with per-model caches


class PathAnalysis:
    """Path conditions and probabilities over one immutable model.

    Results are memoised; every cache entry is written once with a value that
    depends only on the model, so repeated fills are idempotent.
    """

    def __init__(self, model: ProgramModel):
        self.model = model
        self._block_pc: dict[tuple[str, str], dict[int, PathCondition]] = {}
        self._stmt_p: dict[tuple, StmtProbability] = {}
        self._op_p: dict[CallOperation, float] = {}
        self._in_progress: set[tuple] = set()

    def path_conditions(self, cls: str, method: str) -> dict[int, PathCondition]:
        key = (cls, method)
        if key not in self._block_pc:
            self._block_pc[key] = _block_path_conditions(self.model.method(cls, method).body)
        return self._block_pc[key]

    def gen_path_condition(self, stmt: Statement) -> PathCondition:
        cfg = self.model.method(stmt.cls, stmt.method).body
        try:
            block = cfg.stmt_block[stmt.ordinal]
        except KeyError:
            raise ModelError(f"statement {stmt.id} not found in model") from None
        return self.path_conditions(stmt.cls, stmt.method)[block]

    def statement_probability(self, stmt: Statement) -> StmtProbability:
        if stmt.id in self._stmt_p:
            return self._stmt_p[stmt.id]
        pc = self.gen_path_condition(stmt)
        self._in_progress.add(stmt.id)
        try:
            atom = self._atom_rule(stmt)
            literals = [lit for c in pc for lit in _conjunct_literals(c)]
            if contradictory(literals):
                p = 0.0
            else:
                p = math.prod(
                    predicate_probability(c.predicate, c.outcome, c.branch_kind, c.arms, atom) for c in pc
                )
        finally:
            self._in_progress.discard(stmt.id)
        result = StmtProbability(stmt, pc, p)
        self._stmt_p[stmt.id] = result
        return result

    def _atom_rule(self, stmt: Statement) -> Optional[AtomProbability]:
        """Condition atoms that are themselves calls of ``stmt``'s operation.

        Such an atom takes the execution probability of the call statement that
        evaluates it; a cyclic dependency falls back to the default 1/2.
        """
        if stmt.call is None:
            return None
        target = stmt.call.target
        cfg = self.model.method(stmt.cls, stmt.method).body

        def rule(atom: Opaque) -> Optional[float]:
            if atom.call != target:
                return None
            for b in cfg.blocks:
                if b.branch is None or not _mentions(b.branch.predicate, atom):
                    continue
                for s in b.statements:
                    if s.call is not None and s.call.target == target:
                        if s.id in self._in_progress:
                            return None
                        return self.statement_probability(s).probability
            return None

        return rule

    def call_operation_probability(self, op: CallOperation) -> float:
        if op not in self._op_p:
            miss = math.prod(1.0 - self.statement_probability(s).probability
                             for s in extract_statements(self.model, op))
            self._op_p[op] = 1.0 - miss
        return self._op_p[op]


def _mentions(pred: Optional[Predicate], atom: Opaque) -> bool:
    if pred is None:
        return False
    if isinstance(pred, (And, Or)):
        return any(_mentions(a, atom) for a in pred.args)
    if isinstance(pred, Not):
        return _mentions(pred.arg, atom)
    return pred == atom


# module-level conveniences; each builds a throwaway analysis


def gen_path_condition(model: ProgramModel, stmt: Statement) -> PathCondition:
    return PathAnalysis(model).gen_path_condition(stmt)


def statement_probability(model: ProgramModel, stmt: Statement) -> StmtProbability:
    return PathAnalysis(model).statement_probability(stmt)


def call_operation_probability(model: ProgramModel, op: CallOperation) -> float:
    return PathAnalysis(model).call_operation_probability(op)


def find_statement(model: ProgramModel, cls: str, line: int, member: Optional[str] = None) -> Statement:
    """The first statement of ``cls`` on ``line`` (optionally calling ``member``)."""
    for s in model.cls(cls).statements():
        if s.line == line and (member is None or (s.call is not None and s.call.target_member == member)):
            return s
    raise ModelError(f"no statement at {cls} line {line}")
