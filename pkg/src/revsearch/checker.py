"""Static reversibility checks.

The checker enforces name resolution, scalar/array kinds, call arity,
distinct call arguments, and the update restriction: the cell being
updated may not be read by the right-hand side or by its own index.
The restriction is applied by name, so ``a[0] += a[1]`` is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List

from .syntax import (
    BinOp, Call, Expr, If, Index, Local, Loop, Neg, Num, Procedure, Program,
    Size, Skip, Span, Stmt, Swap, Uncall, Update, Var, NO_SPAN,
)

UPDATE_ALIAS = "UpdateAliasError"
UNKNOWN_NAME = "UnknownName"
ARITY_MISMATCH = "ArityMismatch"
ARGUMENT_ALIASING = "ArgumentAliasing"
KIND_MISMATCH = "KindMismatch"
DUPLICATE_NAME = "DuplicateName"


@dataclass(frozen=True)
class CheckError:
    kind: str
    message: str
    span: Span = NO_SPAN

    def __str__(self) -> str:
        return f"{self.span}: {self.kind}: {self.message}"


class CheckFailed(Exception):
    def __init__(self, errors: List[CheckError]):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


@dataclass(frozen=True)
class CheckedProgram:
    """A program that passed :func:`check`.  Only :func:`check` builds these."""

    program: Program

    def __getitem__(self, name: str) -> Procedure:
        return self.program[name]

    def __contains__(self, name: object) -> bool:
        return name in self.program


def free_names(e: Expr) -> FrozenSet[str]:
    """Variable and array names occurring in ``e``."""
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, (Var, Size)):
        return frozenset((e.name,))
    if isinstance(e, Index):
        return frozenset((e.name,)) | free_names(e.index)
    if isinstance(e, Neg):
        return free_names(e.operand)
    if isinstance(e, BinOp):
        return free_names(e.left) | free_names(e.right)
    raise TypeError(f"not an expression: {e!r}")


# name -> True for arrays, False for scalars
Scope = Dict[str, bool]


class _Checker:
    def __init__(self, program: Program):
        self.program = program
        self.errors: List[CheckError] = []
        self.procs: Dict[str, Procedure] = {}

    def error(self, kind: str, message: str, span: Span) -> None:
        self.errors.append(CheckError(kind, message, span))

    def run(self) -> List[CheckError]:
        for proc in self.program.procedures:
            if proc.name in self.procs:
                self.error(DUPLICATE_NAME, f"procedure {proc.name} defined twice", proc.span)
            else:
                self.procs[proc.name] = proc
        for proc in self.program.procedures:
            scope: Scope = {}
            for p in proc.params:
                if p.name in scope:
                    self.error(DUPLICATE_NAME,
                               f"parameter {p.name} repeated in {proc.name}", p.span)
                scope[p.name] = p.is_array
            self.stmts(proc.body, scope)
        return self.errors

    # -- expressions

    def expr(self, e: Expr, scope: Scope) -> None:
        if isinstance(e, Num):
            return
        if isinstance(e, Var):
            if e.name not in scope:
                self.error(UNKNOWN_NAME, f"{e.name} is not bound", e.span)
            elif scope[e.name]:
                self.error(KIND_MISMATCH, f"array {e.name} used as a scalar", e.span)
        elif isinstance(e, (Index, Size)):
            if e.name not in scope:
                self.error(UNKNOWN_NAME, f"{e.name} is not bound", e.span)
            elif not scope[e.name]:
                self.error(KIND_MISMATCH, f"scalar {e.name} used as an array", e.span)
            if isinstance(e, Index):
                self.expr(e.index, scope)
        elif isinstance(e, Neg):
            self.expr(e.operand, scope)
        elif isinstance(e, BinOp):
            self.expr(e.left, scope)
            self.expr(e.right, scope)
        else:
            raise TypeError(f"not an expression: {e!r}")

    def lvalue(self, lv, scope: Scope) -> None:
        self.expr(lv, scope)

    # -- statements

    def stmts(self, body: Iterable[Stmt], scope: Scope) -> None:
        for s in body:
            self.stmt(s, scope)

    def stmt(self, s: Stmt, scope: Scope) -> None:
        if isinstance(s, Update):
            self.lvalue(s.target, scope)
            self.expr(s.rhs, scope)
            name = s.target.name
            if name in free_names(s.rhs):
                self.error(UPDATE_ALIAS, f"{name} is updated and read by the right-hand side", s.span)
            if isinstance(s.target, Index) and name in free_names(s.target.index):
                self.error(UPDATE_ALIAS, f"{name} occurs in its own index", s.span)
        elif isinstance(s, Swap):
            self.lvalue(s.left, scope)
            self.lvalue(s.right, scope)
            swapped = {s.left.name, s.right.name}
            for lv in (s.left, s.right):
                if isinstance(lv, Index) and swapped & free_names(lv.index):
                    self.error(UPDATE_ALIAS, "a swapped name occurs in a swap index", s.span)
                    break
        elif isinstance(s, If):
            self.expr(s.test, scope)
            self.stmts(s.then, scope)
            self.stmts(s.orelse, scope)
            self.expr(s.assertion, scope)
        elif isinstance(s, Loop):
            self.expr(s.entry, scope)
            self.stmts(s.body, scope)
            self.expr(s.until, scope)
        elif isinstance(s, Local):
            self.expr(s.init, scope)
            if s.name in scope:
                self.error(DUPLICATE_NAME, f"local {s.name} shadows a bound name", s.span)
                inner = dict(scope)
            else:
                inner = dict(scope)
                inner[s.name] = False
            self.stmts(s.body, inner)
            self.expr(s.final, scope)
        elif isinstance(s, (Call, Uncall)):
            self.call(s, scope)
        elif isinstance(s, Skip):
            pass
        else:
            raise TypeError(f"not a statement: {s!r}")

    def call(self, s, scope: Scope) -> None:
        callee = self.procs.get(s.proc)
        if callee is None:
            self.error(UNKNOWN_NAME, f"procedure {s.proc} is not defined", s.span)
        elif len(callee.params) != len(s.args):
            self.error(ARITY_MISMATCH,
                       f"{s.proc} takes {len(callee.params)} arguments, got {len(s.args)}", s.span)
        seen = set()
        for i, arg in enumerate(s.args):
            if arg in seen:
                self.error(ARGUMENT_ALIASING, f"{arg} is passed to {s.proc} more than once", s.span)
            seen.add(arg)
            if arg not in scope:
                self.error(UNKNOWN_NAME, f"{arg} is not bound", s.span)
            elif callee is not None and i < len(callee.params):
                if callee.params[i].is_array != scope[arg]:
                    want = "an array" if callee.params[i].is_array else "a scalar"
                    self.error(ARITY_MISMATCH,
                               f"argument {i + 1} of {s.proc} must be {want}", s.span)


def check_errors(program: Program) -> List[CheckError]:
    """Every static violation in ``program``, in source order."""
    if isinstance(program, CheckedProgram):
        program = program.program
    return _Checker(program).run()


def check(program: Program) -> CheckedProgram:
    """Return ``program`` marked as checked, or raise :class:`CheckFailed`."""
    if isinstance(program, CheckedProgram):
        program = program.program
    errors = check_errors(program)
    if errors:
        raise CheckFailed(errors)
    return CheckedProgram(program)
