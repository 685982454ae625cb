"""Seeded generator of synthetic minij programs for property tests and benchmarks."""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass, field

from .frontend import lower, parse, pretty
from .frontend import syntax as ast
from .model import ProgramModel

BRANCH_KINDS = ("if", "while", "for", "switch")


@dataclass(frozen=True)
class SynthSpec:
    classes: int = 8
    edge_density: float = 0.2  # fraction of ordered class pairs with a dependency
    branch_density: float = 0.5  # fraction of member uses placed under a branch
    chain_fraction: float = 0.5  # fraction of calls aimed at methods that call onward
    seed: int = 0
    max_methods: int = 3
    max_attributes: int = 2
    attribute_fraction: float = 0.25  # uses that read an attribute instead of calling
    intraclass_fraction: float = 0.2  # methods that also call a sibling method
    inheritance_fraction: float = 0.1  # classes that extend one of their dependencies

    def __post_init__(self):
        if self.classes < 1 or self.max_methods < 1 or self.max_attributes < 1:
            raise ValueError("class, method and attribute counts must be >= 1")
        for name in ("edge_density", "branch_density", "chain_fraction", "attribute_fraction",
                     "intraclass_fraction", "inheritance_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    def replace(self, **kw) -> "SynthSpec":
        return dataclasses.replace(self, **kw)


@dataclass
class _Use:
    src: int
    dst: int
    host: int  # method index in src
    attribute: bool
    target: int = 0  # attribute or method index in dst
    store: bool = False  # store the call's result in an own attribute


@dataclass
class _ClassPlan:
    index: int
    n_methods: int
    n_attrs: int
    extends: int | None = None
    uses: list[_Use] = field(default_factory=list)
    sibling_calls: dict[int, int] = field(default_factory=dict)


def class_name(i: int) -> str:
    return f"C{i}"


def _attr(i: int, k: int) -> str:
    return f"a{i}_{k}"


def _method(i: int, k: int) -> str:
    return f"m{i}_{k}"


def _ref(i: int, j: int) -> str:
    return f"r{i}_{j}"


def _plan(spec: SynthSpec, rng: random.Random) -> list[_ClassPlan]:
    n = spec.classes
    plans = [_ClassPlan(i, rng.randint(1, spec.max_methods), rng.randint(1, spec.max_attributes)) for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    chosen = sorted(rng.sample(pairs, round(spec.edge_density * len(pairs))))
    for i, j in chosen:
        p = plans[i]
        attribute = rng.random() < spec.attribute_fraction
        p.uses.append(_Use(i, j, rng.randrange(p.n_methods), attribute))

    # inheritance only toward lower indices, only along an existing dependency
    for p in plans:
        parents = [u.dst for u in p.uses if u.dst < p.index]
        if parents and rng.random() < spec.inheritance_fraction:
            p.extends = rng.choice(parents)

    busy = [{u.host for u in p.uses} for p in plans]
    for p in plans:
        for u in p.uses:
            q = plans[u.dst]
            if u.attribute:
                u.target = rng.randrange(q.n_attrs)
                continue
            onward = sorted(busy[q.index])
            quiet = [k for k in range(q.n_methods) if k not in busy[q.index]]
            pool = onward if (rng.random() < spec.chain_fraction and onward) or not quiet else quiet
            u.target = rng.choice(pool)
            u.store = rng.random() < 0.5
        for k in range(p.n_methods):
            if p.n_methods > 1 and rng.random() < spec.intraclass_fraction:
                p.sibling_calls[k] = rng.choice([m for m in range(p.n_methods) if m != k])
    return plans


def _condition(rng: random.Random, i: int) -> ast.Expr:
    x = ast.Name("x")
    a = ast.Name(_attr(i, 0))
    c = lambda: ast.Literal(rng.randint(0, 9))
    shape = rng.randrange(5)
    if shape == 0:
        return ast.Binary(">", x, c())
    if shape == 1:
        return ast.Binary("&&", ast.Binary("<", x, c()), ast.Binary(">=", a, c()))
    if shape == 2:
        return ast.Unary("!", ast.Binary("==", x, c()))
    if shape == 3:
        return ast.Binary("||", ast.Binary(">", x, c()), ast.Binary("<", a, c()))
    return ast.Binary("!=", a, x)


def _wrap(stmt: ast.Stmt, kind: str, rng: random.Random, i: int, counter: list[int]) -> ast.Stmt:
    body = ast.Block((stmt,))
    if kind == "if":
        orelse = ast.Block((ast.Assign(ast.Name("t"), ast.Literal(0)),)) if rng.random() < 0.3 else None
        return ast.If(_condition(rng, i), body, orelse)
    if kind == "while":
        return ast.While(_condition(rng, i), body)
    if kind == "for":
        v = f"i{counter[0]}"
        counter[0] += 1
        return ast.For(
            ast.VarDecl("int", v, ast.Literal(0)),
            ast.Binary("<", ast.Name(v), ast.Literal(rng.randint(1, 5))),
            ast.IncDec(ast.Name(v), "++"),
            body,
        )
    arms = [ast.Case((ast.Literal(0),), (stmt, ast.Break()))]
    if rng.random() < 0.5:
        arms.append(ast.Case((ast.Literal(1), ast.Literal(2)), (ast.Assign(ast.Name("t"), ast.Literal(1)), ast.Break())))
    if rng.random() < 0.5:
        arms.append(ast.Case((None,), (ast.Break(),)))
    return ast.Switch(ast.Name("x"), tuple(arms))


def _use_stmt(u: _Use, i: int, plans: list[_ClassPlan], rng: random.Random) -> ast.Stmt:
    recv = ast.Name(_ref(i, u.dst))
    if u.attribute:
        return ast.Assign(ast.Name("t"), ast.Binary("+", ast.Name("t"), ast.FieldAccess(recv, _attr(u.dst, u.target))))
    call = ast.Call(recv, _method(u.dst, u.target), (ast.Name("x"),))
    if u.store:
        return ast.Assign(ast.Name(_attr(i, rng.randrange(plans[i].n_attrs))), call)
    return ast.ExprStmt(call)


def generate_program(spec: SynthSpec) -> ast.Program:
    """The synthetic program as a syntax tree; identical for identical specs."""
    rng = random.Random(spec.seed)
    plans = _plan(spec, rng)
    all_uses = [(p.index, n) for p in plans for n in range(len(p.uses))]
    branched = set(rng.sample(all_uses, round(spec.branch_density * len(all_uses))))
    classes = []
    for p in plans:
        i = p.index
        fields = [ast.FieldDecl("int", _attr(i, k)) for k in range(p.n_attrs)]
        for j in sorted({u.dst for u in p.uses}):
            fields.append(ast.FieldDecl(class_name(j), _ref(i, j), ast.New(class_name(j))))
        bodies: list[list[ast.Stmt]] = [[ast.VarDecl("int", "t", ast.Literal(0))] for _ in range(p.n_methods)]
        counters = [[0] for _ in range(p.n_methods)]
        for n, u in enumerate(p.uses):
            s = _use_stmt(u, i, plans, rng)
            if (i, n) in branched:
                s = _wrap(s, rng.choice(BRANCH_KINDS), rng, i, counters[u.host])
            bodies[u.host].append(s)
        for k, callee in sorted(p.sibling_calls.items()):
            bodies[k].append(ast.Assign(ast.Name("t"), ast.Call(None, _method(i, callee), (ast.Name("t"),))))
        methods = []
        for k in range(p.n_methods):
            bodies[k].append(ast.Return(ast.Binary("+", ast.Name("t"), ast.Name("x"))))
            methods.append(ast.MethodDef("int", _method(i, k), (ast.Param("int", "x"),), ast.Block(tuple(bodies[k]))))
        extends = class_name(p.extends) if p.extends is not None else None
        classes.append(ast.ClassDef(class_name(i), extends, tuple(fields), tuple(methods)))
    return ast.Program(tuple(classes))


def generate_source(spec: SynthSpec) -> str:
    return pretty(generate_program(spec))


def generate_synthetic(spec: SynthSpec) -> ProgramModel:
    """Round-trip the generated tree through text so statements carry real line numbers."""
    return lower(parse(generate_source(spec)), name=f"synth-{spec.classes}-{spec.seed}")
