"""Statement-level program inversion.

``uncall p`` is executed by running the inverted body of ``p`` forward, so
this module is the single source of truth for backward semantics.
"""

from __future__ import annotations

from typing import Sequence, Tuple

from .syntax import (
    Call, If, Local, Loop, Procedure, Program, Skip, Stmt, Swap, Uncall, Update,
)

_INVERSE_OP = {"+=": "-=", "-=": "+=", "^=": "^="}


def invert_stmt(s: Stmt) -> Stmt:
    if isinstance(s, Update):
        return Update(s.target, _INVERSE_OP[s.op], s.rhs, s.span)
    if isinstance(s, (Swap, Skip)):
        return s
    if isinstance(s, If):
        return If(s.assertion, invert_stmts(s.then), invert_stmts(s.orelse), s.test, s.span)
    if isinstance(s, Loop):
        return Loop(s.until, invert_stmts(s.body), s.entry, s.span)
    if isinstance(s, Local):
        return Local(s.name, s.final, invert_stmts(s.body), s.init, s.span)
    if isinstance(s, Call):
        return Uncall(s.proc, s.args, s.span)
    if isinstance(s, Uncall):
        return Call(s.proc, s.args, s.span)
    raise TypeError(f"not a statement: {s!r}")


def invert_stmts(body: Sequence[Stmt]) -> Tuple[Stmt, ...]:
    """Reverse ``body`` and invert each statement."""
    return tuple(invert_stmt(s) for s in reversed(body))


def invert_procedure(proc: Procedure) -> Procedure:
    return Procedure(proc.name, proc.params, invert_stmts(proc.body), proc.span)


def invert_program(program: Program) -> Program:
    program = getattr(program, "program", program)
    return Program(tuple(invert_procedure(p) for p in program.procedures))
