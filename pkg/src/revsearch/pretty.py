"""Canonical source rendering.  ``parse(pretty(p)) == p`` for every program
whose integer literals are nonnegative (the only ones the parser builds)."""

from __future__ import annotations

from typing import List, Sequence

from .parser import BINARY_PRECEDENCE, UNARY_PRECEDENCE
from .syntax import (
    BinOp, Call, Expr, If, Index, Local, Loop, Neg, Num, Procedure, Program,
    Size, Skip, Stmt, Swap, Uncall, Update, Var,
)

INDENT = "  "
_ATOM = 8


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return BINARY_PRECEDENCE[e.op]
    if isinstance(e, Neg):
        return UNARY_PRECEDENCE
    if isinstance(e, Num) and e.value < 0:
        return UNARY_PRECEDENCE
    return _ATOM


def _wrap(e: Expr, need: int) -> str:
    text = expr_text(e)
    return f"({text})" if _prec(e) < need else text


def expr_text(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{expr_text(e.index)}]"
    if isinstance(e, Size):
        return f"size({e.name})"
    if isinstance(e, Neg):
        # '- -x' would lex fine, but '-(-x)' reads better
        if isinstance(e.operand, Neg):
            return f"-({expr_text(e.operand)})"
        return "-" + _wrap(e.operand, UNARY_PRECEDENCE)
    if isinstance(e, BinOp):
        prec = BINARY_PRECEDENCE[e.op]
        if e.op == "**":
            # base must be a primary; exponent binds as a unary expression
            left = _wrap(e.left, _ATOM)
            right = _wrap(e.right, UNARY_PRECEDENCE)
            return f"{left} ** {right}"
        left = _wrap(e.left, prec)
        right = _wrap(e.right, prec + 1)
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


def _lvalue(lv) -> str:
    return expr_text(lv)


def stmt_lines(s: Stmt, depth: int = 0) -> List[str]:
    pad = INDENT * depth
    if isinstance(s, Update):
        return [f"{pad}{_lvalue(s.target)} {s.op} {expr_text(s.rhs)}"]
    if isinstance(s, Swap):
        return [f"{pad}{_lvalue(s.left)} <=> {_lvalue(s.right)}"]
    if isinstance(s, Skip):
        return [f"{pad}skip"]
    if isinstance(s, (Call, Uncall)):
        word = "call" if isinstance(s, Call) else "uncall"
        return [f"{pad}{word} {s.proc}({', '.join(s.args)})"]
    if isinstance(s, If):
        out = [f"{pad}if {expr_text(s.test)} then"]
        out += body_lines(s.then, depth + 1)
        if s.orelse:
            out.append(f"{pad}else")
            out += body_lines(s.orelse, depth + 1)
        out.append(f"{pad}fi {expr_text(s.assertion)}")
        return out
    if isinstance(s, Loop):
        out = [f"{pad}from {expr_text(s.entry)} loop"]
        out += body_lines(s.body, depth + 1)
        out.append(f"{pad}until {expr_text(s.until)}")
        return out
    if isinstance(s, Local):
        out = [f"{pad}local int {s.name} = {expr_text(s.init)}"]
        out += body_lines(s.body, depth + 1)
        out.append(f"{pad}delocal int {s.name} = {expr_text(s.final)}")
        return out
    raise TypeError(f"not a statement: {s!r}")


def body_lines(body: Sequence[Stmt], depth: int = 0) -> List[str]:
    out: List[str] = []
    for s in body:
        out += stmt_lines(s, depth)
    return out


def procedure_text(proc: Procedure) -> str:
    params = ", ".join(f"int {p.name}[]" if p.is_array else f"int {p.name}" for p in proc.params)
    lines = [f"procedure {proc.name}({params})"] + body_lines(proc.body, 1)
    return "\n".join(lines) + "\n"


def pretty(program: Program) -> str:
    """Render ``program`` as canonical source; the empty program renders as ''."""
    program = getattr(program, "program", program)
    return "\n".join(procedure_text(p) for p in program.procedures)
