"""Lexer and recursive-descent parser for minij.

Grammar (informal)::

    program  := class*
    class    := modifier* "class" ID ("extends" ID)? "{" member* "}"
    member   := modifier* type ID ( ("=" expr)? ("," ID ("=" expr)?)* ";"
                                  | "(" params? ")" block )
    stmt     := if | while | for | switch | return | break | block
              | type ID ("=" expr)? ("," ID ("=" expr)?)* ";"
              | target "=" expr ";" | target ("++"|"--") ";" | expr ";"

Visibility modifiers are accepted and dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from . import syntax as ast

KEYWORDS = {
    "class", "extends", "if", "else", "while", "for", "switch", "case", "default",
    "return", "break", "new", "true", "false", "int", "double", "boolean", "void",
}
MODIFIERS = {"public", "private", "protected", "final"}
SCALARS = ("int", "double", "boolean")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||\+\+|--|[-+*/%<>=!(){};,.:])
    """,
    re.VERBOSE | re.DOTALL,
)


class MinijSyntaxError(SyntaxError):
    def __init__(self, message: str, line: int, col: int, path: str = "<source>"):
        super().__init__(f"{path}:{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.path = path


@dataclass(frozen=True)
class SourceUnit:
    text: str
    path: str = "<source>"

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "SourceUnit":
        p = Path(path)
        return cls(p.read_text(encoding="utf-8"), str(p))


@dataclass(frozen=True)
class Token:
    kind: str  # id | kw | num | op | eof
    value: str
    line: int
    col: int


def tokenize(src: SourceUnit) -> list[Token]:
    text = src.text
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise MinijSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, src.path)
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "op" and text.startswith("/*", pos):
            raise MinijSyntaxError("unterminated comment", line, col, src.path)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "bcomment":
            line += value.count("\n")
            if "\n" in value:
                line_start = pos + value.rindex("\n") + 1
        elif kind == "id":
            tokens.append(Token("kw" if value in KEYWORDS else "id", value, line, col))
        elif kind in ("num", "op"):
            tokens.append(Token(kind, value, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# binary operator precedence, loosest first
_BINARY_LEVELS = (("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/", "%"))


class Parser:
    def __init__(self, src: SourceUnit):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *values: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.value in values

    def error(self, message: str, tok: Optional[Token] = None) -> MinijSyntaxError:
        t = tok or self.tok
        shown = t.value or "end of input"
        return MinijSyntaxError(f"{message} (found {shown!r})", t.line, t.col, self.src.path)

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.error(f"expected {value!r}")
        return self.advance()

    def expect_id(self) -> Token:
        if self.tok.kind != "id":
            raise self.error("expected identifier")
        return self.advance()

    def is_type_start(self) -> bool:
        t = self.tok
        if t.kind == "kw" and t.value in SCALARS:
            return True
        return t.kind == "id" and self.peek().kind == "id"

    def parse_type(self, allow_void: bool = False) -> str:
        t = self.tok
        if t.kind == "kw" and (t.value in SCALARS or (allow_void and t.value == "void")):
            return self.advance().value
        if t.kind == "id":
            return self.advance().value
        raise self.error("expected type")

    # declarations

    def parse_program(self) -> ast.Program:
        classes = []
        while self.tok.kind != "eof":
            classes.append(self.parse_class())
        return ast.Program(tuple(classes))

    def skip_modifiers(self) -> None:
        while self.tok.kind == "id" and self.tok.value in MODIFIERS:
            self.advance()

    def parse_class(self) -> ast.ClassDef:
        self.skip_modifiers()
        start = self.expect("class")
        name = self.expect_id().value
        extends = None
        if self.at("extends"):
            self.advance()
            extends = self.expect_id().value
        self.expect("{")
        fields: list[ast.FieldDecl] = []
        methods: list[ast.MethodDef] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated class body")
            self.skip_modifiers()
            line = self.tok.line
            typ = self.parse_type(allow_void=True)
            name_tok = self.expect_id()
            if self.at("("):
                methods.append(self.parse_method_rest(typ, name_tok.value, line))
            else:
                if typ == "void":
                    raise self.error("field cannot have type void", name_tok)
                fields.extend(self.parse_declarators(typ, name_tok.value, line, ast.FieldDecl))
        self.expect("}")
        return ast.ClassDef(name, extends, tuple(fields), tuple(methods), line=start.line)

    def parse_declarators(self, typ: str, first: str, line: int, node) -> list:
        out = []
        name = first
        while True:
            init = None
            if self.at("="):
                self.advance()
                init = self.parse_expr()
            out.append(node(typ, name, init, line=line))
            if not self.at(","):
                break
            self.advance()
            name = self.expect_id().value
        self.expect(";")
        return out

    def parse_method_rest(self, ret: str, name: str, line: int) -> ast.MethodDef:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ptype = self.parse_type()
                params.append(ast.Param(ptype, self.expect_id().value))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        body = self.parse_block()
        return ast.MethodDef(ret, name, tuple(params), body, line=line)

    # statements

    def parse_block(self) -> ast.Block:
        start = self.expect("{")
        stmts: list[ast.Stmt] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated block")
            stmts.extend(self.parse_statement())
        self.expect("}")
        return ast.Block(tuple(stmts), line=start.line)

    def parse_single(self) -> ast.Block:
        """An if/else/loop body, normalised to a Block (braced or not)."""
        stmts = self.parse_statement()
        if len(stmts) == 1 and isinstance(stmts[0], ast.Block):
            return stmts[0]
        return ast.Block(tuple(stmts), line=stmts[0].line)

    def parse_statement(self) -> list[ast.Stmt]:
        t = self.tok
        line = t.line
        if self.at("{"):
            return [self.parse_block()]
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_single()
            orelse = None
            if self.at("else"):
                self.advance()
                orelse = self.parse_single()
            return [ast.If(cond, then, orelse, line=line)]
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            return [ast.While(cond, self.parse_single(), line=line)]
        if self.at("for"):
            return [self.parse_for()]
        if self.at("switch"):
            return [self.parse_switch()]
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return [ast.Return(value, line=line)]
        if self.at("break"):
            self.advance()
            self.expect(";")
            return [ast.Break(line=line)]
        if self.is_type_start():
            typ = self.parse_type()
            name = self.expect_id().value
            return self.parse_declarators(typ, name, line, ast.VarDecl)
        stmt = self.parse_simple()
        self.expect(";")
        return [stmt]

    def parse_simple(self) -> ast.Stmt:
        """Assignment, increment or expression statement, without the ';'."""
        line = self.tok.line
        if self.is_type_start():
            typ = self.parse_type()
            decl = self.parse_declarator_noterm(typ, line)
            return decl
        expr = self.parse_expr()
        if self.at("="):
            self._check_target(expr)
            self.advance()
            return ast.Assign(expr, self.parse_expr(), line=line)
        if self.at("++", "--"):
            self._check_target(expr)
            return ast.IncDec(expr, self.advance().value, line=line)
        return ast.ExprStmt(expr, line=line)

    def parse_declarator_noterm(self, typ: str, line: int) -> ast.VarDecl:
        name = self.expect_id().value
        init = None
        if self.at("="):
            self.advance()
            init = self.parse_expr()
        return ast.VarDecl(typ, name, init, line=line)

    def _check_target(self, expr: ast.Expr) -> None:
        if not isinstance(expr, (ast.Name, ast.FieldAccess)):
            raise self.error("invalid assignment target")

    def parse_for(self) -> ast.For:
        line = self.advance().line
        self.expect("(")
        init = None if self.at(";") else self.parse_simple()
        self.expect(";")
        cond = None if self.at(";") else self.parse_expr()
        self.expect(";")
        update = None if self.at(")") else self.parse_simple()
        self.expect(")")
        return ast.For(init, cond, update, self.parse_single(), line=line)

    def parse_switch(self) -> ast.Switch:
        line = self.advance().line
        self.expect("(")
        subject = self.parse_expr()
        self.expect(")")
        self.expect("{")
        cases: list[ast.Case] = []
        while not self.at("}"):
            if not self.at("case", "default"):
                raise self.error("expected 'case' or 'default'")
            case_line = self.tok.line
            labels: list = []
            while self.at("case", "default"):
                if self.advance().value == "case":
                    labels.append(self.parse_expr())
                else:
                    labels.append(None)
                self.expect(":")
            body: list[ast.Stmt] = []
            while not self.at("case", "default", "}"):
                if self.tok.kind == "eof":
                    raise self.error("unterminated switch")
                body.extend(self.parse_statement())
            cases.append(ast.Case(tuple(labels), tuple(body), line=case_line))
        self.expect("}")
        if not cases:
            raise self.error("switch without arms")
        return ast.Switch(subject, tuple(cases), line=line)

    # expressions

    def parse_expr(self, level: int = 0) -> ast.Expr:
        if level == len(_BINARY_LEVELS):
            return self.parse_unary()
        left = self.parse_expr(level + 1)
        while self.tok.kind == "op" and self.tok.value in _BINARY_LEVELS[level]:
            op = self.advance()
            right = self.parse_expr(level + 1)
            left = ast.Binary(op.value, left, right, line=op.line)
        return left

    def parse_unary(self) -> ast.Expr:
        if self.at("!", "-"):
            op = self.advance()
            return ast.Unary(op.value, self.parse_unary(), line=op.line)
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        expr = self.parse_primary()
        while self.at("."):
            self.advance()
            name = self.expect_id()
            if self.at("("):
                expr = ast.Call(expr, name.value, self.parse_args(), line=name.line)
            else:
                expr = ast.FieldAccess(expr, name.value, line=name.line)
        return expr

    def parse_args(self) -> tuple[ast.Expr, ...]:
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.parse_expr())
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return tuple(args)

    def parse_primary(self) -> ast.Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            text = t.value
            value: Union[int, float] = float(text) if any(c in text for c in ".eE") else int(text)
            return ast.Literal(value, line=t.line)
        if self.at("true", "false"):
            self.advance()
            return ast.Literal(t.value == "true", line=t.line)
        if self.at("new"):
            self.advance()
            cls = self.expect_id().value
            self.expect("(")
            self.expect(")")
            return ast.New(cls, line=t.line)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if t.kind == "id":
            self.advance()
            if self.at("("):
                return ast.Call(None, t.value, self.parse_args(), line=t.line)
            return ast.Name(t.value, line=t.line)
        raise self.error("expected expression")


def parse(src: Union[SourceUnit, str]) -> ast.Program:
    if isinstance(src, str):
        src = SourceUnit(src)
    return Parser(src).parse_program()


def parse_files(paths: Iterable[Union[str, Path]]) -> ast.Program:
    """Parse several source files as one program (one class per file is common)."""
    prog = ast.Program()
    for p in paths:
        prog = prog + parse(SourceUnit.from_file(p))
    return prog
