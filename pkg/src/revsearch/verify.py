"""Property checks over a corpus directory: round trip, oracle agreement,
zero garbage and constant auxiliary memory."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

from .checker import CheckFailed
from .corpus import Case, load_cases
from .interpreter import BACKWARD, FORWARD, Machine, RuntimeFault
from .metrics import CONSTANT
from .parser import ParseError

DEFAULT_SIZES = (8, 64, 512)

LOAD = "load"
ROUND_TRIP = "round-trip"
ORACLE = "oracle"
GARBAGE = "zero-garbage"
M_CONSTANT = "M-constant"


@dataclass
class CheckResult:
    case: str
    check: str
    passed: bool
    trials: int
    detail: str = ""


class _Tally:
    def __init__(self, case: Case, check: str):
        self.case = case
        self.check = check
        self.trials = 0
        self.failures = 0
        self.first: Optional[str] = None

    def record(self, ok: bool, detail: str = "") -> None:
        self.trials += 1
        if not ok:
            self.failures += 1
            if self.first is None:
                self.first = detail

    def result(self) -> CheckResult:
        if self.failures:
            detail = f"{self.failures}/{self.trials} failed; first: {self.first}"
        else:
            detail = ""
        return CheckResult(self.case.label, self.check, self.failures == 0, self.trials, detail)


def _show(keys, k) -> str:
    shown = keys if len(keys) <= 8 else keys[:8] + ["..."]
    return f"n={len(keys)} keys={shown} k={k}"


def check_input(case: Case, machine: Machine, keys: Sequence[int], k: int,
                tallies: dict) -> None:
    """Run one input forward and back, feeding every tally that applies."""
    store = case.store(keys, k)
    where = _show(list(keys), k)
    try:
        fwd = machine.run(case.entry, store, FORWARD, case.roles)
    except RuntimeFault as err:
        msg = f"{where}: forward {err.kind}: {err.message}"
        for t in tallies.values():
            t.record(False, msg)
        return
    want = case.expected(keys, k)
    got = fwd.store[case.output]
    tallies[ORACLE].record(got == want, f"{where}: {case.output}={got}, oracle {want}")
    if GARBAGE in tallies:
        m = fwd.metrics
        ok = m.garbage_cells == 0 and m.input_restored
        tallies[GARBAGE].record(
            ok, f"{where}: garbage_cells={m.garbage_cells}, input restored={m.input_restored}")
    try:
        back = machine.run(case.entry, fwd.store, BACKWARD)
    except RuntimeFault as err:
        tallies[ROUND_TRIP].record(False, f"{where}: backward {err.kind}: {err.message}")
        return
    tallies[ROUND_TRIP].record(back.store == store, f"{where}: backward run did not restore the store")


def aux_by_size(case: Case, sizes: Iterable[int], machine: Optional[Machine] = None) -> dict:
    machine = machine or Machine(case.program)
    out = {}
    for n in sizes:
        keys, k = case.failure_input(n)
        out[n] = machine.run(case.entry, case.store(keys, k), FORWARD, case.roles).metrics.aux_highwater_cells
    return out


def verify_case(case: Case, trials: int, seed: int = 0, max_n: int = 512,
                sizes: Sequence[int] = DEFAULT_SIZES) -> List[CheckResult]:
    try:
        machine = Machine(case.program)
    except (ParseError, CheckFailed) as err:
        return [CheckResult(case.label, LOAD, False, 0, str(err).splitlines()[0])]
    checks = [ROUND_TRIP, ORACLE] + ([GARBAGE] if case.zero_garbage else [])
    tallies = {name: _Tally(case, name) for name in checks}
    rng = random.Random(f"{seed}:{case.name}")
    for _ in range(trials):
        keys, k = case.random_input(rng, max_n)
        check_input(case, machine, keys, k, tallies)
    results = [t.result() for t in tallies.values()]
    if case.growth.get("aux_highwater_cells") == CONSTANT:
        try:
            aux = aux_by_size(case, sizes, machine)
        except RuntimeFault as err:
            results.append(CheckResult(case.label, M_CONSTANT, False, len(sizes), f"{err.kind}: {err.message}"))
        else:
            same = len(set(aux.values())) == 1
            detail = "" if same else "aux cells by n: " + ", ".join(f"{n}: {v}" for n, v in aux.items())
            results.append(CheckResult(case.label, M_CONSTANT, same, len(sizes), detail))
    return results


def verify_corpus(directory=None, trials: int = 1000, seed: int = 0, max_n: int = 512,
                  sizes: Sequence[int] = DEFAULT_SIZES) -> List[CheckResult]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    results: List[CheckResult] = []
    for case in load_cases(directory):
        results += verify_case(case, trials, seed, max_n, sizes)
    return results


def format_table(results: Sequence[CheckResult]) -> str:
    width = max([len(r.case) for r in results] + [4])
    lines = [f"{'case':<{width}}  {'check':<13} {'trials':>6}  result"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        tail = f"  {r.detail}" if r.detail else ""
        lines.append(f"{r.case:<{width}}  {r.check:<13} {r.trials:>6}  {status}{tail}")
    return "\n".join(lines)
