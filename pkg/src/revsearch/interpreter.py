"""Bidirectional evaluator for checked programs.

Each procedure body is translated once into a tree of Python closures that
mirrors the AST node for node; executing a statement means calling its
closure on a frame (a list of cells indexed by slot).  Backward execution
runs the closures built from the inverted body, see :mod:`.inverter`.

Integers are 64-bit two's complement: ``+ - * **`` wrap, ``/`` truncates
toward zero and ``%`` takes the sign of the dividend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

from .checker import CheckedProgram, check
from .inverter import invert_stmts
from .syntax import (
    BinOp, Call, Expr, If, Index, Local, Loop, Neg, Num, Procedure, Size,
    Skip, Span, Stmt, Swap, Uncall, Update, Var, NO_SPAN,
)

WORD = 1 << 64
SIGN = 1 << 63
MASK = WORD - 1
DEFAULT_FUEL = 10 ** 8

FORWARD = "forward"
BACKWARD = "backward"
DIRECTIONS = (FORWARD, BACKWARD)

FI_ASSERTION = "FiAssertionMismatch"
LOOP_ENTRY = "LoopEntryAssertion"
DELOCAL_MISMATCH = "DelocalMismatch"
INDEX_OUT_OF_BOUNDS = "IndexOutOfBounds"
DIVISION_BY_ZERO = "DivisionByZero"
NEGATIVE_EXPONENT = "NegativeExponent"
ARGUMENT_ALIASING = "ArgumentAliasing"
STEP_LIMIT = "StepLimitExceeded"


def wrap(x: int) -> int:
    """Reduce ``x`` to a signed 64-bit value."""
    if -SIGN <= x < SIGN:
        return x
    return ((x + SIGN) & MASK) - SIGN


class RuntimeFault(Exception):
    """A failed runtime check.  ``kind`` is one of the module-level kind names."""

    def __init__(self, kind: str, message: str, span: Span = NO_SPAN):
        self.kind = kind
        self.span = span
        self.message = message
        super().__init__(f"{span}: {kind}: {message}")


class BindingError(ValueError):
    """The initial store does not fit the entry procedure's parameters."""


class Scalar:
    __slots__ = ("value", "origin")

    def __init__(self, value: int, origin: Optional[str] = None):
        self.value = value
        self.origin = origin

    def __repr__(self):
        return f"Scalar({self.value})"


class Array(list):
    """Fixed-length integer array that counts element reads and writes."""

    __slots__ = ("origin", "reads", "writes")

    def __init__(self, values=(), origin: Optional[str] = None):
        super().__init__(values)
        self.origin = origin
        self.reads = 0
        self.writes = 0


class _Stats:
    __slots__ = ("steps", "live", "peak", "fuel")

    def __init__(self, fuel: int):
        self.fuel = fuel
        self.reset()

    def reset(self):
        self.steps = 0
        self.live = 0
        self.peak = 0


class Tracer:
    """Debug hooks.  ``env`` arguments map visible names to current values."""

    def update(self, stmt: Stmt, env: Mapping, delta: Dict[str, tuple]) -> None:
        pass

    def branch(self, stmt: If, env: Mapping, took_then: bool, assertion: int) -> None:
        pass

    def iteration(self, stmt: Loop, env: Mapping) -> None:
        pass

    def enter(self, proc: str, direction: str, env: Mapping) -> None:
        pass

    def leave(self, proc: str, direction: str, env: Mapping) -> None:
        pass


class StepLog(Tracer):
    """Records one ``(span, delta)`` pair per update or swap, plus every
    conditional's ``(span, took_then, assertion)``."""

    def __init__(self):
        self.steps: List[tuple] = []
        self.branches: List[tuple] = []

    def update(self, stmt, env, delta):
        self.steps.append((stmt.span, delta))

    def branch(self, stmt, env, took_then, assertion):
        self.branches.append((stmt.span, took_then, assertion))


class _FrameView(Mapping):
    def __init__(self, names: Dict[str, int], frame: list):
        self._names = names
        self._frame = frame

    def __getitem__(self, name):
        cell = self._frame[self._names[name]]
        if cell is None:
            raise KeyError(name)
        return cell.value if isinstance(cell, Scalar) else list(cell)

    def __iter__(self):
        return (n for n, i in self._names.items() if self._frame[i] is not None)

    def __len__(self):
        return sum(1 for _ in self)


@dataclass
class RunTrace:
    """Counters collected by one run.  ``reads``/``writes`` are element
    accesses per top-level array name, ``peak_locals`` the largest number
    of simultaneously live local cells."""

    steps: int
    peak_locals: int
    reads: Dict[str, int]
    writes: Dict[str, int]
    params: Dict[str, bool]  # entry parameter -> is_array


@dataclass
class Outcome:
    store: Dict[str, Union[int, List[int]]]
    trace: RunTrace
    metrics: Optional[object] = None  # MetricsRecord when a manifest was given
    initial: Dict[str, Union[int, List[int]]] = field(default_factory=dict, repr=False)


class _Code:
    __slots__ = ("proc", "nslots", "body", "names")


def _fault(kind, span, message):
    raise RuntimeFault(kind, message, span)


# -- expression compilation ---------------------------------------------------

def _divide(a, b, span):
    if b == 0:
        _fault(DIVISION_BY_ZERO, span, f"{a} / 0")
    q = abs(a) // abs(b)
    return wrap(-q if (a < 0) != (b < 0) else q)


def _modulo(a, b, span):
    if b == 0:
        _fault(DIVISION_BY_ZERO, span, f"{a} % 0")
    q = abs(a) // abs(b)
    if (a < 0) != (b < 0):
        q = -q
    return wrap(a - b * q)


def _power(a, b, span):
    if b < 0:
        _fault(NEGATIVE_EXPONENT, span, f"{a} ** {b}")
    return wrap(pow(a, b, WORD))


def _compile_expr(e: Expr, slots: Dict[str, int]) -> Callable[[list], int]:
    if isinstance(e, Num):
        value = wrap(e.value)
        return lambda fr: value
    if isinstance(e, Var):
        s = slots[e.name]
        return lambda fr: fr[s].value
    if isinstance(e, Size):
        s = slots[e.name]
        return lambda fr: len(fr[s])
    if isinstance(e, Index):
        s = slots[e.name]
        index = _compile_expr(e.index, slots)
        name, span = e.name, e.span

        def read(fr):
            a = fr[s]
            i = index(fr)
            if i < 0 or i >= len(a):
                _fault(INDEX_OUT_OF_BOUNDS, span, f"{name}[{i}] with size {len(a)}")
            a.reads += 1
            return a[i]
        return read
    if isinstance(e, Neg):
        operand = _compile_expr(e.operand, slots)
        return lambda fr: wrap(-operand(fr))
    if isinstance(e, BinOp):
        left = _compile_expr(e.left, slots)
        right = _compile_expr(e.right, slots)
        op, span = e.op, e.span
        if op == "+":
            return lambda fr: wrap(left(fr) + right(fr))
        if op == "-":
            return lambda fr: wrap(left(fr) - right(fr))
        if op == "*":
            return lambda fr: wrap(left(fr) * right(fr))
        if op == "/":
            return lambda fr: _divide(left(fr), right(fr), span)
        if op == "%":
            return lambda fr: _modulo(left(fr), right(fr), span)
        if op == "**":
            return lambda fr: _power(left(fr), right(fr), span)
        if op == "&":
            return lambda fr: left(fr) & right(fr)
        if op == "|":
            return lambda fr: left(fr) | right(fr)
        if op == "^":
            return lambda fr: left(fr) ^ right(fr)
        if op == "=":
            return lambda fr: 1 if left(fr) == right(fr) else 0
        if op == "!=":
            return lambda fr: 1 if left(fr) != right(fr) else 0
        if op == "<":
            return lambda fr: 1 if left(fr) < right(fr) else 0
        if op == "<=":
            return lambda fr: 1 if left(fr) <= right(fr) else 0
        if op == ">":
            return lambda fr: 1 if left(fr) > right(fr) else 0
        if op == ">=":
            return lambda fr: 1 if left(fr) >= right(fr) else 0
        if op == "&&":
            return lambda fr: 1 if left(fr) and right(fr) else 0
        if op == "||":
            return lambda fr: 1 if left(fr) or right(fr) else 0
        raise ValueError(f"unknown operator {op}")
    raise TypeError(f"not an expression: {e!r}")


def evaluate(e: Expr, store: Mapping[str, Union[int, Sequence[int]]]) -> int:
    """Evaluate ``e`` against a plain name -> value mapping.  Never mutates."""
    slots = {}
    frame = []
    for name, value in store.items():
        slots[name] = len(frame)
        frame.append(Array(value) if isinstance(value, (list, tuple)) else Scalar(value))
    return _compile_expr(e, slots)(frame)


# -- statement compilation ----------------------------------------------------

class Machine:
    """Compiled form of a checked program.

    A machine runs one execution at a time; distinct machines share nothing.
    """

    def __init__(self, program, *, fuel: int = DEFAULT_FUEL, tracer: Optional[Tracer] = None):
        if not isinstance(program, CheckedProgram):
            program = check(program)
        self.checked = program
        self.tracer = tracer
        self._stats = _Stats(fuel)
        self._code: Dict[tuple, _Code] = {}

    @property
    def fuel(self) -> int:
        return self._stats.fuel

    def code(self, name: str, backward: bool) -> _Code:
        key = (name, backward)
        code = self._code.get(key)
        if code is None:
            proc = self.checked[name]
            code = _Code()
            # register before compiling the body so recursive calls resolve
            self._code[key] = code
            body = invert_stmts(proc.body) if backward else proc.body
            slots = {p.name: i for i, p in enumerate(proc.params)}
            counter = [len(slots)]
            code.proc = proc
            code.names = slots
            code.body = self._block(body, slots, counter)
            code.nslots = counter[0]
        return code

    def _block(self, body, slots, counter):
        fns = [self._stmt(s, slots, counter) for s in body]
        if not fns:
            return lambda fr: None
        if len(fns) == 1:
            return fns[0]
        if len(fns) == 2:
            f0, f1 = fns

            def pair(fr):
                f0(fr)
                f1(fr)
            return pair

        def seq(fr):
            for f in fns:
                f(fr)
        return seq

    def _env(self, slots, fr):
        return _FrameView(dict(slots), fr)

    def _stmt(self, s: Stmt, slots: Dict[str, int], counter: List[int]):
        st = self._stats
        tracer = self.tracer
        span = s.span
        if isinstance(s, Update):
            return self._update(s, slots)
        if isinstance(s, Swap):
            return self._swap(s, slots)
        if isinstance(s, Skip):
            def skip(fr):
                st.steps += 1
            return skip
        if isinstance(s, If):
            test = _compile_expr(s.test, slots)
            then = self._block(s.then, slots, counter)
            orelse = self._block(s.orelse, slots, counter)
            assertion = _compile_expr(s.assertion, slots)
            env_slots = slots

            def cond(fr):
                st.steps += 1
                t = test(fr)
                if t:
                    then(fr)
                else:
                    orelse(fr)
                a = assertion(fr)
                if tracer is not None:
                    tracer.branch(s, self._env(env_slots, fr), bool(t), a)
                if bool(a) != bool(t):
                    branch = "then" if t else "else"
                    _fault(FI_ASSERTION, span,
                           f"fi assertion is {'true' if a else 'false'} after the {branch} branch")
            return cond
        if isinstance(s, Loop):
            entry = _compile_expr(s.entry, slots)
            until = _compile_expr(s.until, slots)
            body = self._block(s.body, slots, counter)
            env_slots = slots

            def loop(fr):
                st.steps += 1
                if not entry(fr):
                    _fault(LOOP_ENTRY, span, "entry assertion is false on arrival")
                while True:
                    if tracer is not None:
                        tracer.iteration(s, self._env(env_slots, fr))
                    if until(fr):
                        return
                    body(fr)
                    if entry(fr):
                        _fault(LOOP_ENTRY, span, "entry assertion is true after an iteration")
                    if st.steps > st.fuel:
                        _fault(STEP_LIMIT, span, f"more than {st.fuel} steps")
            return loop
        if isinstance(s, Local):
            init = _compile_expr(s.init, slots)
            final = _compile_expr(s.final, slots)
            inner = dict(slots)
            slot = counter[0]
            counter[0] += 1
            inner[s.name] = slot
            body = self._block(s.body, inner, counter)
            name = s.name

            def local(fr):
                st.steps += 1
                cell = Scalar(init(fr))
                fr[slot] = cell
                st.live += 1
                if st.live > st.peak:
                    st.peak = st.live
                body(fr)
                fr[slot] = None
                expected = final(fr)
                if cell.value != expected:
                    _fault(DELOCAL_MISMATCH, span,
                           f"delocal {name}: value is {cell.value}, expected {expected}")
                st.live -= 1
            return local
        if isinstance(s, (Call, Uncall)):
            return self._call(s, slots, backward=isinstance(s, Uncall))
        raise TypeError(f"not a statement: {s!r}")

    def _update(self, s: Update, slots):
        st = self._stats
        tracer = self.tracer
        rhs = _compile_expr(s.rhs, slots)
        op = s.op
        target = s.target
        s_slot = slots[target.name]
        env_slots = slots

        if isinstance(target, Var):
            if tracer is None:
                if op == "^=":
                    def update(fr):
                        st.steps += 1
                        c = fr[s_slot]
                        c.value ^= rhs(fr)
                elif op == "+=":
                    def update(fr):
                        st.steps += 1
                        c = fr[s_slot]
                        c.value = wrap(c.value + rhs(fr))
                else:
                    def update(fr):
                        st.steps += 1
                        c = fr[s_slot]
                        c.value = wrap(c.value - rhs(fr))
                return update
            combine = _combiner(op)
            label = target.name

            def traced(fr):
                st.steps += 1
                c = fr[s_slot]
                old = c.value
                c.value = combine(old, rhs(fr))
                tracer.update(s, self._env(env_slots, fr), {label: (old, c.value)})
            return traced

        index = _compile_expr(target.index, slots)
        combine = _combiner(op)
        name, span = target.name, s.span

        def update_element(fr):
            st.steps += 1
            a = fr[s_slot]
            i = index(fr)
            if i < 0 or i >= len(a):
                _fault(INDEX_OUT_OF_BOUNDS, span, f"{name}[{i}] with size {len(a)}")
            old = a[i]
            a[i] = combine(old, rhs(fr))
            a.reads += 1
            a.writes += 1
            if tracer is not None:
                tracer.update(s, self._env(env_slots, fr), {f"{name}[{i}]": (old, a[i])})
        return update_element

    def _swap(self, s: Swap, slots):
        st = self._stats
        tracer = self.tracer
        env_slots = slots
        left = _locator(s.left, slots, s.span)
        right = _locator(s.right, slots, s.span)

        def swap(fr):
            st.steps += 1
            lc, li = left(fr)
            rc, ri = right(fr)
            lv = lc.value if li is None else lc[li]
            rv = rc.value if ri is None else rc[ri]
            if li is None:
                lc.value = rv
            else:
                lc[li] = rv
            if ri is None:
                rc.value = lv
            else:
                rc[ri] = lv
            if tracer is not None:
                delta = {_describe(s.left, li): (lv, rv), _describe(s.right, ri): (rv, lv)}
                tracer.update(s, self._env(env_slots, fr), delta)
        return swap

    def _call(self, s, slots, backward: bool):
        st = self._stats
        tracer = self.tracer
        arg_slots = [slots[a] for a in s.args]
        span = s.span
        proc = s.proc
        resolved: List[_Code] = []
        direction = BACKWARD if backward else FORWARD

        def call(fr):
            st.steps += 1
            if not resolved:
                resolved.append(self.code(proc, backward))
            code = resolved[0]
            cells = [fr[i] for i in arg_slots]
            if len({id(c) for c in cells}) != len(cells):
                _fault(ARGUMENT_ALIASING, span, f"one cell bound to two parameters of {proc}")
            if st.steps > st.fuel:
                _fault(STEP_LIMIT, span, f"more than {st.fuel} steps")
            callee = cells + [None] * (code.nslots - len(cells))
            if tracer is not None:
                tracer.enter(proc, direction, self._env(code.names, callee))
            code.body(callee)
            if tracer is not None:
                tracer.leave(proc, direction, self._env(code.names, callee))
        return call

    # -- entry point

    def run(self, entry: str, store: Mapping, direction: str = FORWARD,
            manifest=None) -> Outcome:
        """Run ``entry`` on a copy of ``store``; raises :class:`RuntimeFault`."""
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
        if entry not in self.checked:
            raise BindingError(f"no procedure named {entry}")
        proc: Procedure = self.checked[entry]
        cells = {}
        for name, value in store.items():
            if isinstance(value, (list, tuple)):
                cells[name] = Array((wrap(v) for v in value), origin=name)
            else:
                cells[name] = Scalar(wrap(value), origin=name)
        for p in proc.params:
            if p.name not in cells:
                raise BindingError(f"parameter {p.name} of {entry} is not bound")
            if isinstance(cells[p.name], Array) != p.is_array:
                kind = "an array" if p.is_array else "a scalar"
                raise BindingError(f"parameter {p.name} of {entry} must be {kind}")
        code = self.code(entry, direction == BACKWARD)
        frame = [cells[p.name] for p in proc.params] + [None] * (code.nslots - len(proc.params))
        st = self._stats
        st.reset()
        if self.tracer is not None:
            self.tracer.enter(entry, direction, self._env(code.names, frame))
        code.body(frame)
        if self.tracer is not None:
            self.tracer.leave(entry, direction, self._env(code.names, frame))
        final = {name: (c.value if isinstance(c, Scalar) else list(c)) for name, c in cells.items()}
        trace = RunTrace(
            steps=st.steps,
            peak_locals=st.peak,
            reads={n: c.reads for n, c in cells.items() if isinstance(c, Array)},
            writes={n: c.writes for n, c in cells.items() if isinstance(c, Array)},
            params={p.name: p.is_array for p in proc.params},
        )
        initial = {n: (list(v) if isinstance(v, (list, tuple)) else v) for n, v in store.items()}
        outcome = Outcome(final, trace, None, initial)
        if manifest is not None:
            from .metrics import compute_metrics
            outcome.metrics = compute_metrics(outcome, manifest, program=entry, direction=direction)
        return outcome


def _combiner(op):
    if op == "+=":
        return lambda a, b: wrap(a + b)
    if op == "-=":
        return lambda a, b: wrap(a - b)
    return lambda a, b: a ^ b


def _locator(lv, slots, span):
    s = slots[lv.name]
    if isinstance(lv, Var):
        return lambda fr: (fr[s], None)
    index = _compile_expr(lv.index, slots)
    name = lv.name

    def locate(fr):
        a = fr[s]
        i = index(fr)
        if i < 0 or i >= len(a):
            _fault(INDEX_OUT_OF_BOUNDS, span, f"{name}[{i}] with size {len(a)}")
        a.reads += 1
        a.writes += 1
        return a, i
    return locate


def _describe(lv, i):
    return lv.name if i is None else f"{lv.name}[{i}]"


def run(program, entry: str, store: Mapping, direction: str = FORWARD, *,
        manifest=None, fuel: int = DEFAULT_FUEL, tracer: Optional[Tracer] = None) -> Outcome:
    """Check (if needed), compile and run ``entry`` once."""
    return Machine(program, fuel=fuel, tracer=tracer).run(entry, store, direction, manifest)
