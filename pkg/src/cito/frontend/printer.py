"""Pretty-printer for minij ASTs.  ``parse(pretty(p)) == p`` for any tree."""

from __future__ import annotations

from . import syntax as ast

INDENT = "    "


def pretty(program: ast.Program) -> str:
    out: list[str] = []
    for c in program.classes:
        _class(c, out)
    return "\n".join(out) + ("\n" if out else "")


def _class(c: ast.ClassDef, out: list[str]) -> None:
    head = f"class {c.name}"
    if c.extends:
        head += f" extends {c.extends}"
    out.append(head + " {")
    for f in c.fields:
        init = f" = {expr(f.init)}" if f.init is not None else ""
        out.append(f"{INDENT}{f.type} {f.name}{init};")
    for m in c.methods:
        params = ", ".join(f"{p.type} {p.name}" for p in m.params)
        out.append(f"{INDENT}{m.ret} {m.name}({params}) {{")
        for s in m.body.stmts:
            _stmt(s, 2, out)
        out.append(INDENT + "}")
    out.append("}")


def _body(s: ast.Block, depth: int, out: list[str]) -> None:
    out[-1] += " {"
    for inner in s.stmts:
        _stmt(inner, depth + 1, out)
    out.append(INDENT * depth + "}")


def _stmt(s: ast.Stmt, depth: int, out: list[str]) -> None:
    pad = INDENT * depth
    if isinstance(s, ast.Block):
        out.append(pad + "{")
        for inner in s.stmts:
            _stmt(inner, depth + 1, out)
        out.append(pad + "}")
    elif isinstance(s, ast.If):
        out.append(f"{pad}if ({expr(s.cond)})")
        _body(s.then, depth, out)
        if s.orelse is not None:
            out.append(f"{pad}else")
            _body(s.orelse, depth, out)
    elif isinstance(s, ast.While):
        out.append(f"{pad}while ({expr(s.cond)})")
        _body(s.body, depth, out)
    elif isinstance(s, ast.For):
        init = simple(s.init) if s.init is not None else ""
        cond = expr(s.cond) if s.cond is not None else ""
        update = simple(s.update) if s.update is not None else ""
        out.append(f"{pad}for ({init}; {cond}; {update})")
        _body(s.body, depth, out)
    elif isinstance(s, ast.Switch):
        out.append(f"{pad}switch ({expr(s.subject)}) {{")
        for case in s.cases:
            labels = " ".join("default:" if l is None else f"case {expr(l)}:" for l in case.labels)
            out.append(f"{pad}{INDENT}{labels}")
            for inner in case.body:
                _stmt(inner, depth + 2, out)
        out.append(pad + "}")
    elif isinstance(s, ast.Return):
        out.append(pad + ("return;" if s.value is None else f"return {expr(s.value)};"))
    elif isinstance(s, ast.Break):
        out.append(pad + "break;")
    else:
        out.append(pad + simple(s) + ";")


def simple(s: ast.Stmt) -> str:
    if isinstance(s, ast.VarDecl):
        init = f" = {expr(s.init)}" if s.init is not None else ""
        return f"{s.type} {s.name}{init}"
    if isinstance(s, ast.Assign):
        return f"{expr(s.target)} = {expr(s.value)}"
    if isinstance(s, ast.IncDec):
        return f"{expr(s.target)}{s.op}"
    if isinstance(s, ast.ExprStmt):
        return expr(s.expr)
    raise TypeError(f"not a simple statement: {s!r}")


def expr(e: ast.Expr) -> str:
    if isinstance(e, ast.Literal):
        if isinstance(e.value, bool):
            return "true" if e.value else "false"
        return repr(e.value)
    if isinstance(e, ast.Name):
        return e.id
    if isinstance(e, ast.New):
        return f"new {e.cls}()"
    if isinstance(e, ast.FieldAccess):
        return f"{_receiver(e.obj)}.{e.name}"
    if isinstance(e, ast.Call):
        args = ", ".join(expr(a) for a in e.args)
        prefix = "" if e.obj is None else _receiver(e.obj) + "."
        return f"{prefix}{e.name}({args})"
    if isinstance(e, ast.Unary):
        return f"{e.op}{_operand(e.operand)}"
    if isinstance(e, ast.Binary):
        return f"{_operand(e.left)} {e.op} {_operand(e.right)}"
    raise TypeError(f"not an expression: {e!r}")


def _operand(e: ast.Expr) -> str:
    text = expr(e)
    if isinstance(e, (ast.Binary, ast.Unary)) or (isinstance(e, ast.Literal) and text.startswith("-")):
        return f"({text})"
    return text


def _receiver(e: ast.Expr) -> str:
    if isinstance(e, ast.Literal):
        return f"({expr(e)})"
    return _operand(e)
