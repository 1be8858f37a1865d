"""Growth measurements behind the trade-off report.

Every case runs forward on its deterministic failure input at each size;
each metric's series is then classified and compared with the class the
case's manifest expects.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Sequence

from .corpus import Case, load_cases
from .interpreter import FORWARD, Machine
from .metrics import SCHEMA_VERSION, classify_growth

METRICS = ("input_reads", "aux_highwater_cells", "garbage_cells", "steps")
DEFAULT_SIZES = (8, 64, 512)


@dataclass
class Classification:
    case: str
    case_id: str
    metric: str
    samples: List[List[int]]
    observed: str
    expected: str = ""

    @property
    def matches(self) -> bool:
        return not self.expected or self.expected == self.observed


@dataclass
class BenchReport:
    sizes: List[int]
    rows: List[dict] = field(default_factory=list)
    classifications: List[Classification] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.matches for c in self.classifications)

    def checked(self) -> List[Classification]:
        return [c for c in self.classifications if c.expected]

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "sizes": list(self.sizes),
            "workload": "failure",
            "records": self.rows,
            "classifications": [dict(asdict(c), matches=c.matches) for c in self.classifications],
        }


def measure(case: Case, n: int, machine: Machine = None) -> dict:
    machine = machine or Machine(case.program)
    keys, k = case.failure_input(n)
    outcome = machine.run(case.entry, case.store(keys, k), FORWARD, case.roles)
    return outcome.metrics.to_json(
        program=case.name, n=n, **{"case-id": str(case.case_id or case.name)},
        direction=FORWARD, outcome="ok")


def bench_cases(cases: Sequence[Case], sizes: Sequence[int] = DEFAULT_SIZES) -> BenchReport:
    report = BenchReport(sorted(sizes))
    for case in cases:
        machine = Machine(case.program)
        rows = [measure(case, n, machine) for n in report.sizes]
        report.rows += rows
        for metric in METRICS:
            samples = [[row["n"], row[metric]] for row in rows]
            report.classifications.append(Classification(
                case=case.name,
                case_id=str(case.case_id or case.name),
                metric=metric,
                samples=samples,
                observed=classify_growth([tuple(s) for s in samples]),
                expected=case.growth.get(metric, ""),
            ))
    return report


def bench(directory=None, sizes: Sequence[int] = DEFAULT_SIZES) -> BenchReport:
    return bench_cases(load_cases(directory), sizes)


def format_report(report: BenchReport, only_expected: bool = True) -> str:
    shown = report.checked() if only_expected else report.classifications
    lines = [f"{'case':<18} {'program':<18} {'metric':<20} {'values':<22} {'observed':<13} expected"]
    for c in shown:
        values = ",".join(str(m) for _, m in c.samples)
        mark = "" if c.matches else "  MISMATCH"
        lines.append(f"{c.case_id:<18} {c.case:<18} {c.metric:<20} {values:<22} "
                     f"{c.observed:<13} {c.expected or '-'}{mark}")
    return "\n".join(lines)


def series(report: BenchReport, metric: str) -> Dict[str, List[tuple]]:
    """metric values per program, ordered by n"""
    out: Dict[str, List[tuple]] = {}
    for row in report.rows:
        out.setdefault(row["program"], []).append((row["n"], row[metric]))
    return out
