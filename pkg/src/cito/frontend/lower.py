"""Lower a minij AST to a :class:`~cito.model.ProgramModel`.

Each source statement becomes one model statement per call site it contains
(a statement without calls becomes a single non-call statement), so a
statement such as ``x = a.f() + b.g();`` yields two call statements sharing
one line.  Conditions stay whole: ``&&``/``||`` trees become one predicate on
one branch terminator, and calls inside conditions are emitted as call
statements in the branching block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..model import (
    SCALAR_TYPES,
    VOID,
    And,
    AttributeDecl,
    BasicBlock,
    BranchStmt,
    CallSite,
    Cfg,
    CfgEdge,
    ClassDecl,
    Comparison,
    MethodDecl,
    ModelError,
    Not,
    Opaque,
    Or,
    Predicate,
    ProgramModel,
    Statement,
    case_kind,
    is_class_type,
)
from . import syntax as ast
from .printer import expr as expr_text

COMPARISONS = {"<", "<=", ">", ">=", "==", "!="}
_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


class LoweringError(ModelError):
    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class NameResolutionError(LoweringError):
    pass


class _Classes:
    """Member lookup over the declared classes, following ``extends``."""

    def __init__(self, program: ast.Program):
        self.defs: dict[str, ast.ClassDef] = {}
        for c in program.classes:
            if c.name in self.defs:
                raise LoweringError(f"duplicate class {c.name!r}", c.line)
            self.defs[c.name] = c

    def chain(self, cls: str):
        seen = set()
        while cls is not None and cls not in seen:
            seen.add(cls)
            c = self.defs[cls]
            yield c
            cls = c.extends if c.extends in self.defs else None

    def find_field(self, cls: str, name: str) -> Optional[tuple[str, str]]:
        for c in self.chain(cls):
            for f in c.fields:
                if f.name == name:
                    return c.name, f.type
        return None

    def find_method(self, cls: str, name: str) -> Optional[tuple[str, str]]:
        for c in self.chain(cls):
            for m in c.methods:
                if m.name == name:
                    return c.name, m.ret
        return None


@dataclass
class _Block:
    statements: list[Statement] = field(default_factory=list)
    branch: Optional[BranchStmt] = None


class _MethodLowerer:
    def __init__(self, classes: _Classes, cls: ast.ClassDef, method: ast.MethodDef):
        self.classes = classes
        self.cls = cls
        self.method = method
        self.locals: dict[str, str] = {}
        for p in method.params:
            if p.name in self.locals:
                raise LoweringError(f"duplicate parameter {p.name!r}", method.line)
            self._check_type(p.type, method.line)
            self.locals[p.name] = p.type
        self.blocks: list[_Block] = []
        self.edges: list[tuple[int, int, str]] = []
        self.ordinal = 0
        self.cur: Optional[int] = self.new_block()

    # ---- helpers

    def new_block(self) -> int:
        self.blocks.append(_Block())
        return len(self.blocks) - 1

    def edge(self, src: int, dst: int, kind: str) -> None:
        self.edges.append((src, dst, kind))

    def has_preds(self, b: int) -> bool:
        return any(dst == b for _, dst, _ in self.edges)

    def _check_type(self, typ: str, line: int) -> None:
        if is_class_type(typ) and typ not in self.classes.defs:
            raise NameResolutionError(f"undeclared class {typ!r}", line)

    def need_cur(self, line: int) -> int:
        if self.cur is None:
            raise LoweringError("unreachable statement", line)
        return self.cur

    def emit(self, line: int, kind: str, sites: list[CallSite], assigns: Optional[str] = None) -> None:
        blk = self.blocks[self.need_cur(line)]
        if not sites:
            blk.statements.append(Statement(self.cls.name, self.method.name, self.ordinal, line, kind))
            self.ordinal += 1
            return
        for site in sites:
            blk.statements.append(
                Statement(self.cls.name, self.method.name, self.ordinal, line, "call", site, assigns)
            )
            self.ordinal += 1

    def site(self, decl_cls: str, member: str, kind: str) -> CallSite:
        return CallSite(self.cls.name, self.method.name, decl_cls, member, kind)

    # ---- expressions

    def visit(self, e: ast.Expr, sites: list[CallSite]) -> Optional[str]:
        """Collect call sites of ``e`` in evaluation order; return its static type."""
        if isinstance(e, ast.Literal):
            if isinstance(e.value, bool):
                return "boolean"
            return "double" if isinstance(e.value, float) else "int"
        if isinstance(e, ast.Name):
            if e.id in self.locals:
                return self.locals[e.id]
            found = self.classes.find_field(self.cls.name, e.id)
            if found is None:
                raise NameResolutionError(f"undeclared name {e.id!r}", e.line)
            return found[1]
        if isinstance(e, ast.New):
            self._check_type(e.cls, e.line)
            if not is_class_type(e.cls):
                raise NameResolutionError(f"cannot instantiate {e.cls!r}", e.line)
            return e.cls
        if isinstance(e, ast.FieldAccess):
            owner = self._object_type(e.obj, sites, e.line)
            found = self.classes.find_field(owner, e.name)
            if found is None:
                raise NameResolutionError(f"class {owner!r} has no attribute {e.name!r}", e.line)
            sites.append(self.site(found[0], e.name, "attribute"))
            return found[1]
        if isinstance(e, ast.Call):
            owner = self.cls.name if e.obj is None else self._object_type(e.obj, sites, e.line)
            found = self.classes.find_method(owner, e.name)
            if found is None:
                raise NameResolutionError(f"class {owner!r} has no method {e.name!r}", e.line)
            for a in e.args:
                self.visit(a, sites)
            sites.append(self.site(found[0], e.name, "method"))
            return found[1]
        if isinstance(e, ast.Unary):
            t = self.visit(e.operand, sites)
            return "boolean" if e.op == "!" else t
        if isinstance(e, ast.Binary):
            lt = self.visit(e.left, sites)
            rt = self.visit(e.right, sites)
            if e.op in COMPARISONS or e.op in ("&&", "||"):
                return "boolean"
            if lt == "double" or rt == "double":
                return "double"
            return "int" if lt == rt == "int" else None
        raise LoweringError(f"unsupported expression {e!r}")

    def _object_type(self, obj: ast.Expr, sites: list[CallSite], line: int) -> str:
        t = self.visit(obj, sites)
        if t is None or not is_class_type(t):
            raise NameResolutionError(f"member access on non-object {expr_text(obj)!r}", line)
        return t

    # ---- predicates

    def predicate(self, e: ast.Expr, sites: list[CallSite]) -> Predicate:
        if isinstance(e, ast.Binary) and e.op in ("&&", "||"):
            node = And if e.op == "&&" else Or
            args: list[Predicate] = []
            for side in (e.left, e.right):
                p = self.predicate(side, sites)
                args.extend(p.args if isinstance(p, node) else [p])
            return node(tuple(args))
        if isinstance(e, ast.Unary) and e.op == "!":
            return Not(self.predicate(e.operand, sites))
        start = len(sites)
        self.visit(e, sites)
        atom_sites = sites[start:]
        if isinstance(e, ast.Binary) and e.op in COMPARISONS:
            lvar, rvar = _var_name(e.left), _var_name(e.right)
            lconst, rconst = _const(e.left), _const(e.right)
            if lvar is not None and rconst is not None:
                return Comparison(lvar, e.op, rconst)
            if lconst is not None and rvar is not None:
                return Comparison(rvar, _FLIP[e.op], lconst)
            if lvar is not None and rvar is not None:
                return Comparison(lvar, e.op, rvar)
        elif isinstance(e, (ast.Name, ast.FieldAccess)):
            var = _var_name(e)
            if var is not None:
                return Comparison(var, "==", True)
        method_sites = [s for s in atom_sites if s.member_kind == "method"]
        call = method_sites[-1].target if method_sites else None
        return Opaque(expr_text(e), call)

    # ---- statements

    def lower_body(self) -> Cfg:
        for s in self.method.body.stmts:
            self.stmt(s)
        return self._finish()

    def stmt(self, s: ast.Stmt) -> None:
        if isinstance(s, ast.Block):
            for inner in s.stmts:
                self.stmt(inner)
        elif isinstance(s, ast.If):
            self._if(s)
        elif isinstance(s, ast.While):
            self._loop("while", s.cond, s.body, None, s.line)
        elif isinstance(s, ast.For):
            if s.init is not None:
                self.stmt(s.init)
            self._loop("for", s.cond, s.body, s.update, s.line)
        elif isinstance(s, ast.Switch):
            self._switch(s)
        elif isinstance(s, ast.Return):
            sites: list[CallSite] = []
            if s.value is not None:
                self.visit(s.value, sites)
            self.emit(s.line, "return", sites)
            self.cur = None
        elif isinstance(s, ast.Break):
            raise LoweringError("'break' is only supported as the last statement of a switch arm", s.line)
        elif isinstance(s, ast.VarDecl):
            if s.name in self.locals:
                raise LoweringError(f"duplicate local {s.name!r}", s.line)
            self._check_type(s.type, s.line)
            sites = []
            if s.init is not None:
                self.visit(s.init, sites)
            self.locals[s.name] = s.type
            self.emit(s.line, "assignment" if s.init is not None else "other", sites)
        elif isinstance(s, (ast.Assign, ast.IncDec)):
            self._assign(s)
        elif isinstance(s, ast.ExprStmt):
            sites = []
            self.visit(s.expr, sites)
            self.emit(s.line, "other", sites)
        else:
            raise LoweringError(f"unsupported statement {s!r}")

    def _assign(self, s) -> None:
        sites: list[CallSite] = []
        target = s.target
        assigns = None
        kind = "assignment"
        if isinstance(target, ast.Name):
            if target.id not in self.locals:
                found = self.classes.find_field(self.cls.name, target.id)
                if found is None:
                    raise NameResolutionError(f"undeclared name {target.id!r}", s.line)
                kind = "attribute-access"
                if found[0] == self.cls.name:
                    assigns = target.id
            if isinstance(s, ast.Assign):
                self.visit(s.value, sites)
        else:
            owner = self._object_type(target.obj, sites, s.line)
            if isinstance(s, ast.Assign):
                self.visit(s.value, sites)
            found = self.classes.find_field(owner, target.name)
            if found is None:
                raise NameResolutionError(f"class {owner!r} has no attribute {target.name!r}", s.line)
            sites.append(self.site(found[0], target.name, "attribute"))
        self.emit(s.line, kind, sites, assigns)

    def _if(self, s: ast.If) -> None:
        sites: list[CallSite] = []
        pred = self.predicate(s.cond, sites)
        head = self.need_cur(s.line)
        if sites:
            self.emit(s.line, "other", sites)
        self.blocks[head].branch = BranchStmt("if", pred)
        then = self.new_block()
        self.edge(head, then, "branch-true")
        self.cur = then
        self.stmt(s.then)
        ends = [self.cur]
        if s.orelse is not None:
            other = self.new_block()
            self.edge(head, other, "branch-false")
            self.cur = other
            self.stmt(s.orelse)
            ends.append(self.cur)
        join = self.new_block()
        if s.orelse is None:
            self.edge(head, join, "branch-false")
        for end in ends:
            if end is not None:
                self.edge(end, join, "fallthrough")
        self.cur = join if self.has_preds(join) else None

    def _loop(self, kind: str, cond, body: ast.Block, update, line: int) -> None:
        pre = self.need_cur(line)
        header = self.new_block()
        self.edge(pre, header, "fallthrough")
        self.cur = header
        sites: list[CallSite] = []
        pred = self.predicate(cond, sites) if cond is not None else Opaque("true")
        if sites:
            self.emit(line, "other", sites)
        self.blocks[header].branch = BranchStmt(kind, pred)
        first = self.new_block()
        self.edge(header, first, "loop-body")
        self.cur = first
        self.stmt(body)
        if self.cur is not None:
            if update is not None:
                self.stmt(update)
            self.edge(self.cur, header, "fallthrough")
        exit_ = self.new_block()
        self.edge(header, exit_, "loop-exit")
        self.cur = exit_

    def _switch(self, s: ast.Switch) -> None:
        sites: list[CallSite] = []
        self.visit(s.subject, sites)
        head = self.need_cur(s.line)
        if sites:
            self.emit(s.line, "other", sites)
        has_default = any(None in c.labels for c in s.cases)
        arms = len(s.cases) + (0 if has_default else 1)
        self.blocks[head].branch = BranchStmt("switch", arms=arms)
        ends = []
        for k, case in enumerate(s.cases):
            arm = self.new_block()
            self.edge(head, arm, case_kind(k))
            self.cur = arm
            body = list(case.body)
            if body and isinstance(body[-1], ast.Break):
                body.pop()
            for inner in body:
                self.stmt(inner)
            ends.append(self.cur)
        join = self.new_block()
        if not has_default:
            self.edge(head, join, case_kind(arms - 1))
        for end in ends:
            if end is not None:
                self.edge(end, join, "fallthrough")
        self.cur = join if self.has_preds(join) else None

    # ---- CFG cleanup

    def _finish(self) -> Cfg:
        succ: dict[int, list[int]] = {}
        for src, dst, _ in self.edges:
            succ.setdefault(src, []).append(dst)
        seen = {0}
        stack = [0]
        while stack:
            for d in succ.get(stack.pop(), []):
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
        for i, b in enumerate(self.blocks):
            if i not in seen and b.statements:
                raise LoweringError("unreachable statement", b.statements[0].line)
        live = {i: self.blocks[i] for i in sorted(seen)}
        edges = [e for e in self.edges if e[0] in live and e[1] in live]

        changed = True
        while changed:
            changed = False
            for bid in list(live):
                if bid == 0:
                    continue
                ins = [e for e in edges if e[1] == bid]
                if len(ins) != 1 or ins[0][2] != "fallthrough":
                    continue
                src = ins[0][0]
                outs = [e for e in edges if e[0] == src]
                if len(outs) != 1 or live[src].branch is not None or src == bid:
                    continue
                live[src].statements.extend(live[bid].statements)
                live[src].branch = live[bid].branch
                edges = [(src if s == bid else s, d, k) for s, d, k in edges if (s, d, k) != ins[0]]
                del live[bid]
                changed = True
                break

        renum = {old: new for new, old in enumerate(sorted(live))}
        blocks = tuple(
            BasicBlock(renum[old], tuple(b.statements), b.branch) for old, b in sorted(live.items())
        )
        cfg_edges = tuple(CfgEdge(renum[s], renum[d], k) for s, d, k in edges)
        return Cfg(0, blocks, cfg_edges)


def _var_name(e: ast.Expr) -> Optional[str]:
    if isinstance(e, ast.Name):
        return e.id
    if isinstance(e, ast.FieldAccess):
        base = _var_name(e.obj)
        return None if base is None else f"{base}.{e.name}"
    return None


def _const(e: ast.Expr):
    if isinstance(e, ast.Literal):
        return e.value
    if isinstance(e, ast.Unary) and e.op == "-" and isinstance(e.operand, ast.Literal):
        if not isinstance(e.operand.value, bool):
            return -e.operand.value
    return None


def lower(program: ast.Program, name: str = "program") -> ProgramModel:
    classes = _Classes(program)
    decls = []
    for c in program.classes:
        if c.extends is not None and c.extends not in classes.defs:
            raise NameResolutionError(f"undeclared superclass {c.extends!r}", c.line)
        attrs = []
        for f in c.fields:
            if f.type not in SCALAR_TYPES and f.type not in classes.defs:
                raise NameResolutionError(f"undeclared class {f.type!r}", f.line)
            if f.init is not None:
                sites: list[CallSite] = []
                probe = _MethodLowerer(classes, c, ast.MethodDef(VOID, "<init>", (), ast.Block()))
                probe.visit(f.init, sites)
                if sites:
                    raise LoweringError("member access is not allowed in field initialisers", f.line)
            attrs.append(AttributeDecl(f.name, f.type))
        methods = []
        for m in c.methods:
            if m.ret not in SCALAR_TYPES and m.ret != VOID and m.ret not in classes.defs:
                raise NameResolutionError(f"undeclared class {m.ret!r}", m.line)
            cfg = _MethodLowerer(classes, c, m).lower_body()
            methods.append(MethodDecl(m.name, tuple((p.name, p.type) for p in m.params), m.ret, cfg))
        decls.append(ClassDecl(c.name, tuple(attrs), tuple(methods), c.extends))
    return ProgramModel(name, tuple(decls)).validate()
