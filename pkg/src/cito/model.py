"""Program model types and the PMIF JSON interchange format.

A :class:`ProgramModel` is the analysis substrate: classes, their attributes
and methods, and one control-flow graph per method.  All types are frozen
dataclasses built from tuples, so two models compare structurally with ``==``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Optional, Union

PMIF_VERSION = 1

SCALAR_TYPES = frozenset({"int", "double", "boolean"})
VOID = "void"

STATEMENT_KINDS = ("call", "attribute-access", "assignment", "return", "other")
MEMBER_KINDS = ("method", "attribute")
BRANCH_KINDS = ("if", "switch", "while", "for")
COMPARATORS = ("<", "<=", ">", ">=", "==", "!=")


class ModelError(ValueError):
    """A model violates one of its structural invariants."""


class PmifError(ModelError):
    """PMIF input is malformed; ``path`` locates the offending JSON node."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnresolvedReferenceError(ModelError):
    def __init__(self, name: str, context: str):
        super().__init__(f"unresolved reference {name!r} ({context})")
        self.name = name


def is_class_type(type_name: str) -> bool:
    return type_name not in SCALAR_TYPES and type_name != VOID


# --------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class CallTarget:
    target_class: str
    target_member: str
    member_kind: str = "method"


@dataclass(frozen=True)
class Comparison:
    """Atomic comparison ``var cmp rhs``; a ``str`` rhs names a variable."""

    var: str
    cmp: str
    rhs: Union[int, float, bool, str]


@dataclass(frozen=True)
class Opaque:
    """Unanalysable condition atom.  ``call`` links atoms that are call results."""

    text: str
    call: Optional[CallTarget] = None


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: Any


Predicate = Union[Comparison, Opaque, And, Or, Not]


def iter_atoms(pred: Predicate) -> Iterator[Union[Comparison, Opaque]]:
    if isinstance(pred, (And, Or)):
        for a in pred.args:
            yield from iter_atoms(a)
    elif isinstance(pred, Not):
        yield from iter_atoms(pred.arg)
    else:
        yield pred


def format_predicate(pred: Predicate) -> str:
    if isinstance(pred, Comparison):
        rhs = pred.rhs
        if isinstance(rhs, bool):
            rhs = "true" if rhs else "false"
        return f"{pred.var} {pred.cmp} {rhs}"
    if isinstance(pred, Opaque):
        return pred.text
    if isinstance(pred, Not):
        return f"!({format_predicate(pred.arg)})"
    sep = " && " if isinstance(pred, And) else " || "
    return "(" + sep.join(format_predicate(a) for a in pred.args) + ")"


# --------------------------------------------------------------------------
# statements and control flow


@dataclass(frozen=True)
class CallSite:
    caller_class: str
    caller_method: str
    target_class: str
    target_member: str
    member_kind: str = "method"

    @property
    def target(self) -> CallTarget:
        return CallTarget(self.target_class, self.target_member, self.member_kind)


@dataclass(frozen=True)
class Statement:
    cls: str
    method: str
    ordinal: int
    line: int
    kind: str
    call: Optional[CallSite] = None
    # own-class attribute receiving this statement's value, if any
    assigns: Optional[str] = None

    @property
    def id(self) -> tuple[str, str, int]:
        return (self.cls, self.method, self.ordinal)


@dataclass(frozen=True)
class BranchStmt:
    kind: str
    predicate: Optional[Predicate] = None
    arms: Optional[int] = None


@dataclass(frozen=True)
class BasicBlock:
    id: int
    statements: tuple[Statement, ...] = ()
    branch: Optional[BranchStmt] = None


@dataclass(frozen=True)
class CfgEdge:
    src: int
    dst: int
    kind: str  # fallthrough | branch-true | branch-false | case(k) | loop-body | loop-exit


def case_kind(k: int) -> str:
    return f"case({k})"


def parse_case_kind(kind: str) -> Optional[int]:
    if kind.startswith("case(") and kind.endswith(")"):
        try:
            return int(kind[5:-1])
        except ValueError:
            return None
    return None


@dataclass(frozen=True)
class Cfg:
    entry: int
    blocks: tuple[BasicBlock, ...]
    edges: tuple[CfgEdge, ...]

    @cached_property
    def block_map(self) -> dict[int, BasicBlock]:
        return {b.id: b for b in self.blocks}

    @cached_property
    def successors(self) -> dict[int, list[CfgEdge]]:
        out: dict[int, list[CfgEdge]] = {b.id: [] for b in self.blocks}
        for e in self.edges:
            out[e.src].append(e)
        return out

    @cached_property
    def predecessors(self) -> dict[int, list[CfgEdge]]:
        inc: dict[int, list[CfgEdge]] = {b.id: [] for b in self.blocks}
        for e in self.edges:
            inc[e.dst].append(e)
        return inc

    @cached_property
    def stmt_block(self) -> dict[int, int]:
        return {s.ordinal: b.id for b in self.blocks for s in b.statements}

    def statements(self) -> list[Statement]:
        return sorted((s for b in self.blocks for s in b.statements), key=lambda s: s.ordinal)

    def reachable(self, skip: Optional[CfgEdge] = None) -> set[int]:
        seen = {self.entry}
        stack = [self.entry]
        while stack:
            for e in self.successors[stack.pop()]:
                if e is skip or e.dst in seen:
                    continue
                seen.add(e.dst)
                stack.append(e.dst)
        return seen


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    type: str


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[tuple[str, str], ...]
    return_type: str
    body: Cfg


@dataclass(frozen=True)
class ClassDecl:
    name: str
    attributes: tuple[AttributeDecl, ...] = ()
    methods: tuple[MethodDecl, ...] = ()
    extends: Optional[str] = None

    @property
    def field_object_types(self) -> frozenset[str]:
        return frozenset(a.type for a in self.attributes if is_class_type(a.type))

    @cached_property
    def method_map(self) -> dict[str, MethodDecl]:
        return {m.name: m for m in self.methods}

    @cached_property
    def attribute_map(self) -> dict[str, AttributeDecl]:
        return {a.name: a for a in self.attributes}

    def has_member(self, name: str, kind: str) -> bool:
        return name in (self.method_map if kind == "method" else self.attribute_map)

    def statements(self) -> list[Statement]:
        return [s for m in self.methods for s in m.body.statements()]


@dataclass(frozen=True)
class ProgramModel:
    name: str = "program"
    classes: tuple[ClassDecl, ...] = ()

    @cached_property
    def class_map(self) -> dict[str, ClassDecl]:
        return {c.name: c for c in self.classes}

    def cls(self, name: str) -> ClassDecl:
        try:
            return self.class_map[name]
        except KeyError:
            raise UnresolvedReferenceError(name, "class") from None

    def method(self, cls: str, name: str) -> MethodDecl:
        try:
            return self.cls(cls).method_map[name]
        except KeyError:
            raise UnresolvedReferenceError(f"{cls}.{name}", "method") from None

    def statements(self) -> Iterator[Statement]:
        for c in self.classes:
            yield from c.statements()

    def call_sites(self) -> Iterator[CallSite]:
        for s in self.statements():
            if s.call is not None:
                yield s.call

    def validate(self) -> "ProgramModel":
        """Check every model invariant; return self for chaining."""
        names = [c.name for c in self.classes]
        _require_unique(names, "class")
        for c in self.classes:
            _require_unique([a.name for a in c.attributes], f"attribute in {c.name}")
            _require_unique([m.name for m in c.methods], f"method in {c.name}")
            if c.extends is not None:
                if c.extends == c.name:
                    raise ModelError(f"class {c.name} extends itself")
                if c.extends not in self.class_map:
                    raise UnresolvedReferenceError(c.extends, f"superclass of {c.name}")
            for a in c.attributes:
                self._check_type(a.type, f"type of {c.name}.{a.name}")
            for m in c.methods:
                for _, ptype in m.params:
                    self._check_type(ptype, f"parameter of {c.name}.{m.name}")
                if m.return_type != VOID:
                    self._check_type(m.return_type, f"return type of {c.name}.{m.name}")
                self._check_cfg(c, m)
        self._check_inheritance()
        return self

    def _check_type(self, type_name: str, context: str) -> None:
        if is_class_type(type_name) and type_name not in self.class_map:
            raise UnresolvedReferenceError(type_name, context)

    def _check_inheritance(self) -> None:
        for c in self.classes:
            seen = {c.name}
            cur = c.extends
            while cur is not None:
                if cur in seen:
                    raise ModelError(f"inheritance cycle through {cur}")
                seen.add(cur)
                cur = self.class_map[cur].extends

    def _check_cfg(self, c: ClassDecl, m: MethodDecl) -> None:
        where = f"{c.name}.{m.name}"
        cfg = m.body
        ids = [b.id for b in cfg.blocks]
        _require_unique(ids, f"block id in {where}")
        if cfg.entry not in cfg.block_map:
            raise ModelError(f"{where}: entry block {cfg.entry} missing")
        for e in cfg.edges:
            if e.src not in cfg.block_map or e.dst not in cfg.block_map:
                raise ModelError(f"{where}: edge {e.src}->{e.dst} names a missing block")
        unreachable = set(ids) - cfg.reachable()
        if unreachable:
            raise ModelError(f"{where}: blocks {sorted(unreachable)} unreachable from entry")
        ordinals = [s.ordinal for b in cfg.blocks for s in b.statements]
        _require_unique(ordinals, f"statement id in {where}")
        for b in cfg.blocks:
            self._check_block(c, m, b, [e.kind for e in cfg.successors[b.id]])

    def _check_block(self, c: ClassDecl, m: MethodDecl, b: BasicBlock, out: list[str]) -> None:
        where = f"{c.name}.{m.name} block {b.id}"
        for s in b.statements:
            if s.cls != c.name or s.method != m.name:
                raise ModelError(f"{where}: statement {s.id} filed under wrong method")
            if s.kind not in STATEMENT_KINDS:
                raise ModelError(f"{where}: unknown statement kind {s.kind!r}")
            if (s.kind == "call") != (s.call is not None):
                raise ModelError(f"{where}: statement {s.ordinal} kind/call mismatch")
            if s.call is not None:
                t = s.call
                if t.member_kind not in MEMBER_KINDS:
                    raise ModelError(f"{where}: unknown member kind {t.member_kind!r}")
                if t.target_class not in self.class_map:
                    raise UnresolvedReferenceError(t.target_class, f"call target in {where}")
                if not self.class_map[t.target_class].has_member(t.target_member, t.member_kind):
                    raise UnresolvedReferenceError(
                        f"{t.target_class}.{t.target_member}", f"call target in {where}"
                    )
            if s.assigns is not None and s.assigns not in c.attribute_map:
                raise UnresolvedReferenceError(f"{c.name}.{s.assigns}", f"assignment in {where}")
        br = b.branch
        if br is None:
            if any(k != "fallthrough" for k in out) or len(out) > 1:
                raise ModelError(f"{where}: branch edges without a branch statement")
            return
        if br.kind not in BRANCH_KINDS:
            raise ModelError(f"{where}: unknown branch kind {br.kind!r}")
        if br.kind == "switch":
            if br.arms is None or br.arms < 1:
                raise ModelError(f"{where}: switch needs at least one arm")
            expected = sorted(case_kind(k) for k in range(br.arms))
        else:
            if br.predicate is None:
                raise ModelError(f"{where}: {br.kind} without predicate")
            _check_predicate(br.predicate, where)
            if br.kind == "if":
                expected = ["branch-false", "branch-true"]
            else:
                expected = ["loop-body", "loop-exit"]
        if sorted(out) != sorted(expected):
            raise ModelError(f"{where}: {br.kind} has out-edges {sorted(out)}, expected {expected}")


def _check_predicate(pred: Any, where: str) -> None:
    if isinstance(pred, Comparison):
        if pred.cmp not in COMPARATORS:
            raise ModelError(f"{where}: unknown comparator {pred.cmp!r}")
        if not pred.var:
            raise ModelError(f"{where}: comparison without a variable")
    elif isinstance(pred, Opaque):
        pass
    elif isinstance(pred, (And, Or)):
        if not pred.args:
            raise ModelError(f"{where}: empty {type(pred).__name__.lower()}")
        for a in pred.args:
            _check_predicate(a, where)
    elif isinstance(pred, Not):
        _check_predicate(pred.arg, where)
    else:
        raise ModelError(f"{where}: malformed predicate {pred!r}")


def _require_unique(names: list, what: str) -> None:
    seen = set()
    for n in names:
        if n in seen:
            raise ModelError(f"duplicate {what}: {n!r}")
        seen.add(n)


# --------------------------------------------------------------------------
# PMIF encoding


def save_pmif(model: ProgramModel) -> bytes:
    return json.dumps(model_to_json(model), indent=1, ensure_ascii=False).encode("utf-8")


def load_pmif(data: Union[bytes, str]) -> ProgramModel:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise PmifError("$", f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise PmifError("$", f"invalid JSON: {exc}") from None
    return model_from_json(doc)


def model_to_json(model: ProgramModel) -> dict:
    return {
        "pmif_version": PMIF_VERSION,
        "name": model.name,
        "classes": [_class_to_json(c) for c in model.classes],
    }


def _class_to_json(c: ClassDecl) -> dict:
    out: dict[str, Any] = {"name": c.name}
    if c.extends is not None:
        out["extends"] = c.extends
    out["attributes"] = [{"name": a.name, "type": a.type} for a in c.attributes]
    out["methods"] = [
        {
            "name": m.name,
            "params": [{"name": n, "type": t} for n, t in m.params],
            "return": m.return_type,
            "cfg": {
                "entry": m.body.entry,
                "blocks": [_block_to_json(b) for b in m.body.blocks],
                "edges": [{"from": e.src, "to": e.dst, "kind": e.kind} for e in m.body.edges],
            },
        }
        for m in c.methods
    ]
    return out


def _block_to_json(b: BasicBlock) -> dict:
    out: dict[str, Any] = {"id": b.id, "statements": []}
    for s in b.statements:
        st: dict[str, Any] = {"id": s.ordinal, "line": s.line, "kind": s.kind}
        if s.call is not None:
            st["call"] = _target_to_json(s.call.target)
        if s.assigns is not None:
            st["assigns"] = s.assigns
        out["statements"].append(st)
    if b.branch is not None:
        br: dict[str, Any] = {"kind": b.branch.kind}
        if b.branch.arms is not None:
            br["arms"] = b.branch.arms
        if b.branch.predicate is not None:
            br["predicate"] = pred_to_json(b.branch.predicate)
        out["branch"] = br
    return out


def _target_to_json(t: CallTarget) -> dict:
    return {"target_class": t.target_class, "target_member": t.target_member, "member_kind": t.member_kind}


def pred_to_json(pred: Predicate) -> dict:
    if isinstance(pred, Comparison):
        return {"var": pred.var, "cmp": pred.cmp, "rhs": pred.rhs}
    if isinstance(pred, Opaque):
        out: dict[str, Any] = {"opaque": pred.text}
        if pred.call is not None:
            out["call"] = _target_to_json(pred.call)
        return out
    if isinstance(pred, Not):
        return {"op": "not", "args": [pred_to_json(pred.arg)]}
    op = "and" if isinstance(pred, And) else "or"
    return {"op": op, "args": [pred_to_json(a) for a in pred.args]}


class _Reader:
    """Strict JSON-object reader that tracks the current JSON path."""

    def __init__(self, obj: Any, path: str):
        self.obj = obj
        self.path = path

    def expect_object(self, required: set[str], optional: set[str] = frozenset()) -> None:
        if not isinstance(self.obj, dict):
            raise PmifError(self.path, "expected an object")
        keys = set(self.obj)
        missing = required - keys
        if missing:
            raise PmifError(self.path, f"missing key(s) {sorted(missing)}")
        unknown = keys - required - set(optional)
        if unknown:
            raise PmifError(self.path, f"unknown key(s) {sorted(unknown)}")

    def get(self, key: str, typ: Union[type, tuple], default: Any = None) -> Any:
        if key not in self.obj:
            return default
        val = self.obj[key]
        ok = isinstance(val, typ) and not (typ is int and isinstance(val, bool))
        if not ok:
            want = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
            raise PmifError(f"{self.path}.{key}", f"expected {want}, got {type(val).__name__}")
        return val

    def items(self, key: str) -> Iterator["_Reader"]:
        for i, item in enumerate(self.get(key, list, [])):
            yield _Reader(item, f"{self.path}.{key}[{i}]")


def model_from_json(doc: Any) -> ProgramModel:
    r = _Reader(doc, "$")
    r.expect_object({"pmif_version", "name", "classes"})
    if r.get("pmif_version", int) != PMIF_VERSION:
        raise PmifError("$.pmif_version", f"unsupported version {doc['pmif_version']!r}")
    classes = tuple(_class_from_json(c) for c in r.items("classes"))
    return ProgramModel(name=r.get("name", str), classes=classes).validate()


def _class_from_json(r: _Reader) -> ClassDecl:
    r.expect_object({"name", "attributes", "methods"}, {"extends"})
    name = r.get("name", str)
    attrs = []
    for a in r.items("attributes"):
        a.expect_object({"name", "type"})
        attrs.append(AttributeDecl(a.get("name", str), a.get("type", str)))
    methods = tuple(_method_from_json(m, name) for m in r.items("methods"))
    return ClassDecl(name, tuple(attrs), methods, r.get("extends", str))


def _method_from_json(r: _Reader, cls: str) -> MethodDecl:
    r.expect_object({"name", "params", "return", "cfg"})
    name = r.get("name", str)
    params = []
    for p in r.items("params"):
        p.expect_object({"name", "type"})
        params.append((p.get("name", str), p.get("type", str)))
    cr = _Reader(r.get("cfg", dict), f"{r.path}.cfg")
    cr.expect_object({"entry", "blocks", "edges"})
    blocks = tuple(_block_from_json(b, cls, name) for b in cr.items("blocks"))
    edges = []
    for e in cr.items("edges"):
        e.expect_object({"from", "to", "kind"})
        kind = e.get("kind", str)
        if kind not in ("fallthrough", "branch-true", "branch-false", "loop-body", "loop-exit"):
            if parse_case_kind(kind) is None:
                raise PmifError(f"{e.path}.kind", f"unknown edge kind {kind!r}")
        edges.append(CfgEdge(e.get("from", int), e.get("to", int), kind))
    return MethodDecl(name, tuple(params), r.get("return", str), Cfg(cr.get("entry", int), blocks, tuple(edges)))


def _block_from_json(r: _Reader, cls: str, method: str) -> BasicBlock:
    r.expect_object({"id", "statements"}, {"branch"})
    stmts = []
    for s in r.items("statements"):
        s.expect_object({"id", "line", "kind"}, {"call", "assigns"})
        kind = s.get("kind", str)
        if kind not in STATEMENT_KINDS:
            raise PmifError(f"{s.path}.kind", f"unknown statement kind {kind!r}")
        call = None
        if "call" in s.obj:
            t = _target_from_json(_Reader(s.obj["call"], f"{s.path}.call"))
            call = CallSite(cls, method, t.target_class, t.target_member, t.member_kind)
        stmts.append(Statement(cls, method, s.get("id", int), s.get("line", int), kind, call, s.get("assigns", str)))
    branch = None
    if "branch" in r.obj:
        br = _Reader(r.obj["branch"], f"{r.path}.branch")
        br.expect_object({"kind"}, {"arms", "predicate"})
        kind = br.get("kind", str)
        if kind not in BRANCH_KINDS:
            raise PmifError(f"{br.path}.kind", f"unknown branch kind {kind!r}")
        pred = None
        if "predicate" in br.obj:
            pred = _pred_from_json(_Reader(br.obj["predicate"], f"{br.path}.predicate"))
        branch = BranchStmt(kind, pred, br.get("arms", int))
    return BasicBlock(r.get("id", int), tuple(stmts), branch)


def _target_from_json(r: _Reader) -> CallTarget:
    r.expect_object({"target_class", "target_member", "member_kind"})
    kind = r.get("member_kind", str)
    if kind not in MEMBER_KINDS:
        raise PmifError(f"{r.path}.member_kind", f"unknown member kind {kind!r}")
    return CallTarget(r.get("target_class", str), r.get("target_member", str), kind)


def _pred_from_json(r: _Reader) -> Predicate:
    if not isinstance(r.obj, dict):
        raise PmifError(r.path, "expected a predicate object")
    if "op" in r.obj:
        r.expect_object({"op", "args"})
        op = r.get("op", str)
        args = [_pred_from_json(a) for a in r.items("args")]
        if op == "not":
            if len(args) != 1:
                raise PmifError(f"{r.path}.args", "'not' takes exactly one argument")
            return Not(args[0])
        if op not in ("and", "or"):
            raise PmifError(f"{r.path}.op", f"unknown operator {op!r}")
        if not args:
            raise PmifError(f"{r.path}.args", f"'{op}' needs at least one argument")
        return (And if op == "and" else Or)(tuple(args))
    if "opaque" in r.obj:
        r.expect_object({"opaque"}, {"call"})
        call = None
        if "call" in r.obj:
            call = _target_from_json(_Reader(r.obj["call"], f"{r.path}.call"))
        return Opaque(r.get("opaque", str), call)
    r.expect_object({"var", "cmp", "rhs"})
    cmp = r.get("cmp", str)
    if cmp not in COMPARATORS:
        raise PmifError(f"{r.path}.cmp", f"unknown comparator {cmp!r}")
    return Comparison(r.get("var", str), cmp, r.get("rhs", (int, float, bool, str)))
