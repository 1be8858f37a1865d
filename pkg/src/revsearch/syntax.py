"""Abstract syntax for the reversible language subset.

All nodes are frozen dataclasses.  Every node carries a ``span`` that is
excluded from equality, so two trees compare equal iff they are
structurally identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class Span:
    offset: int
    line: int
    column: int
    length: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"

    def cover(self, other: "Span") -> "Span":
        end = max(self.offset + self.length, other.offset + other.length)
        first = self if self.offset <= other.offset else other
        return Span(first.offset, first.line, first.column, end - first.offset)


NO_SPAN = Span(0, 0, 0, 0)


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int
    span: Span = _span()


@dataclass(frozen=True)
class Var:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Index:
    name: str
    index: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Size:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = _span()


Expr = Union[Num, Var, Index, Size, Neg, BinOp]
LValue = Union[Var, Index]

ARITH_OPS = ("+", "-", "*", "/", "%", "**", "&", "|", "^")
COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
LOGIC_OPS = ("&&", "||")
BINARY_OPS = ARITH_OPS + COMPARE_OPS + LOGIC_OPS
UPDATE_OPS = ("+=", "-=", "^=")


# -- statements --------------------------------------------------------------

@dataclass(frozen=True)
class Update:
    target: LValue
    op: str
    rhs: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Swap:
    left: LValue
    right: LValue
    span: Span = _span()


@dataclass(frozen=True)
class If:
    test: Expr
    then: Tuple["Stmt", ...]
    orelse: Tuple["Stmt", ...]
    assertion: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Loop:
    entry: Expr
    body: Tuple["Stmt", ...]
    until: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Local:
    name: str
    init: Expr
    body: Tuple["Stmt", ...]
    final: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Call:
    proc: str
    args: Tuple[str, ...]
    span: Span = _span()


@dataclass(frozen=True)
class Uncall:
    proc: str
    args: Tuple[str, ...]
    span: Span = _span()


@dataclass(frozen=True)
class Skip:
    span: Span = _span()


Stmt = Union[Update, Swap, If, Loop, Local, Call, Uncall, Skip]


# -- declarations ------------------------------------------------------------

@dataclass(frozen=True)
class Param:
    name: str
    is_array: bool = False
    span: Span = _span()


@dataclass(frozen=True)
class Procedure:
    name: str
    params: Tuple[Param, ...]
    body: Tuple[Stmt, ...]
    span: Span = _span()

    def param(self, name: str) -> Optional[Param]:
        for p in self.params:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class Program:
    """An ordered collection of procedures.  Order only matters for printing."""

    procedures: Tuple[Procedure, ...] = ()

    def __getitem__(self, name: str) -> Procedure:
        for p in self.procedures:
            if p.name == name:
                return p
        raise KeyError(name)

    def __contains__(self, name: object) -> bool:
        return any(p.name == name for p in self.procedures)

    def names(self) -> list:
        return [p.name for p in self.procedures]

    def replace(self, proc: Procedure) -> "Program":
        """Return a copy with ``proc`` substituted for the procedure of the same name."""
        return Program(tuple(proc if p.name == proc.name else p for p in self.procedures))


def strip_spans(node):
    """Return ``node`` with every span reset.  Equality ignores spans anyway;
    this is for reprs and hashing stability in tests."""
    if isinstance(node, tuple):
        return tuple(strip_spans(n) for n in node)
    if not hasattr(node, "__dataclass_fields__") or isinstance(node, Span):
        return node
    kwargs = {}
    for name in node.__dataclass_fields__:
        value = getattr(node, name)
        kwargs[name] = NO_SPAN if name == "span" else strip_spans(value)
    return type(node)(**kwargs)
