"""AST for the minij demo language.

Every node carries a ``line``; it is excluded from equality so that two
trees parsed from differently laid-out sources compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


def _line() -> int:
    return field(default=0, compare=False)


# expressions


@dataclass(frozen=True)
class Literal:
    value: Union[int, float, bool]
    line: int = _line()


@dataclass(frozen=True)
class Name:
    id: str
    line: int = _line()


@dataclass(frozen=True)
class FieldAccess:
    obj: "Expr"
    name: str
    line: int = _line()


@dataclass(frozen=True)
class Call:
    obj: Optional["Expr"]  # None for an unqualified call on the current object
    name: str
    args: tuple["Expr", ...] = ()
    line: int = _line()


@dataclass(frozen=True)
class New:
    cls: str
    line: int = _line()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = _line()


@dataclass(frozen=True)
class Unary:
    op: str  # "!" or "-"
    operand: "Expr"
    line: int = _line()


Expr = Union[Literal, Name, FieldAccess, Call, New, Binary, Unary]


# statements


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...] = ()
    line: int = _line()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Block
    orelse: Optional[Block] = None
    line: int = _line()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Block
    line: int = _line()


@dataclass(frozen=True)
class For:
    init: Optional["Stmt"]
    cond: Optional[Expr]
    update: Optional["Stmt"]
    body: Block
    line: int = _line()


@dataclass(frozen=True)
class Case:
    labels: tuple[Optional[Expr], ...]  # None marks ``default``
    body: tuple["Stmt", ...]
    line: int = _line()


@dataclass(frozen=True)
class Switch:
    subject: Expr
    cases: tuple[Case, ...]
    line: int = _line()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    line: int = _line()


@dataclass(frozen=True)
class Break:
    line: int = _line()


@dataclass(frozen=True)
class VarDecl:
    type: str
    name: str
    init: Optional[Expr] = None
    line: int = _line()


@dataclass(frozen=True)
class Assign:
    target: Union[Name, FieldAccess]
    value: Expr
    line: int = _line()


@dataclass(frozen=True)
class IncDec:
    target: Union[Name, FieldAccess]
    op: str  # "++" or "--"
    line: int = _line()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    line: int = _line()


Stmt = Union[Block, If, While, For, Switch, Return, Break, VarDecl, Assign, IncDec, ExprStmt]


# declarations


@dataclass(frozen=True)
class Param:
    type: str
    name: str


@dataclass(frozen=True)
class FieldDecl:
    type: str
    name: str
    init: Optional[Expr] = None
    line: int = _line()


@dataclass(frozen=True)
class MethodDef:
    ret: str
    name: str
    params: tuple[Param, ...]
    body: Block
    line: int = _line()


@dataclass(frozen=True)
class ClassDef:
    name: str
    extends: Optional[str]
    fields: tuple[FieldDecl, ...]
    methods: tuple[MethodDef, ...]
    line: int = _line()


@dataclass(frozen=True)
class Program:
    classes: tuple[ClassDef, ...] = ()

    def __add__(self, other: "Program") -> "Program":
        return Program(self.classes + other.classes)
