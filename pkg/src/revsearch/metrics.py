"""Efficiency measures for reversible runs.

* ``input_reads``: element reads of the input arrays (the file being searched).
* ``aux_highwater_cells``: peak number of live auxiliary scalar cells, i.e.
  locals plus entry parameters that are neither input nor output.
* ``garbage_cells``: nonzero cells left outside input and output, plus input
  cells that were not restored.
* ``steps``: executed statements.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

SCHEMA_VERSION = 1

CONSTANT = "constant"
LINEAR = "linear"
LOGARITHMIC = "logarithmic"
UNCLASSIFIED = "unclassified"

# a fixed ratio c fits when every ratio lies in [c * (1 - BAND), c * (1 + BAND)]
BAND = 0.25


class ManifestMismatch(ValueError):
    pass


class InsufficientSamples(ValueError):
    pass


@dataclass(frozen=True)
class RoleManifest:
    input: FrozenSet[str]
    output: FrozenSet[str]
    garbage: FrozenSet[str] = frozenset()  # declared garbage outputs, counted like any auxiliary cell

    def __post_init__(self):
        for name in ("input", "output", "garbage"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        overlap = (self.input & self.output) | (self.input & self.garbage) | (self.output & self.garbage)
        if overlap:
            raise ManifestMismatch(f"names with two roles: {sorted(overlap)}")

    def validate(self, params: Iterable[str]) -> None:
        unknown = (self.input | self.output | self.garbage) - set(params)
        if unknown:
            raise ManifestMismatch(f"manifest names unbound parameters: {sorted(unknown)}")


@dataclass
class MetricsRecord:
    input_reads: int
    aux_highwater_cells: int
    garbage_cells: int
    steps: int
    input_restored: bool = True
    input_writes: int = 0

    def to_json(self, **context) -> dict:
        """The report row: context keys (program, n, case-id, ...) then counts."""
        row = {"schema_version": SCHEMA_VERSION}
        row.update(context)
        row.update(asdict(self))
        return row


def _cells(value) -> Sequence[int]:
    return value if isinstance(value, list) else [value]


def unrestored_inputs(initial: Mapping, final: Mapping, manifest: RoleManifest) -> List[str]:
    return sorted(n for n in manifest.input if initial[n] != final[n])


def audit_garbage(initial: Mapping, final: Mapping, manifest: RoleManifest) -> int:
    """Count garbage cells after a successful run.

    Cells outside input and output count when nonzero; input cells count
    when they differ from their initial value.
    """
    names = set(initial)
    if names != set(final):
        raise ManifestMismatch("initial and final stores bind different names")
    unbound = (manifest.input | manifest.output) - names
    if unbound:
        raise ManifestMismatch(f"manifest names unbound cells: {sorted(unbound)}")
    total = 0
    for name in names:
        if name in manifest.output:
            continue
        if name in manifest.input:
            total += sum(1 for a, b in zip(_cells(initial[name]), _cells(final[name])) if a != b)
        else:
            total += sum(1 for v in _cells(final[name]) if v != 0)
    return total


def count_input_reads(trace, manifest: RoleManifest) -> int:
    return sum(trace.reads.get(name, 0) for name in manifest.input)


def count_input_writes(trace, manifest: RoleManifest) -> int:
    return sum(trace.writes.get(name, 0) for name in manifest.input)


def aux_highwater(trace, manifest: Optional[RoleManifest] = None) -> int:
    """Peak live auxiliary scalar cells.  Without a manifest only locals count."""
    aux_params = 0
    if manifest is not None:
        roles = manifest.input | manifest.output
        aux_params = sum(1 for name, is_array in trace.params.items()
                         if not is_array and name not in roles)
    return trace.peak_locals + aux_params


def compute_metrics(outcome, manifest: RoleManifest, **_context) -> MetricsRecord:
    manifest.validate(outcome.trace.params)
    return MetricsRecord(
        input_reads=count_input_reads(outcome.trace, manifest),
        aux_highwater_cells=aux_highwater(outcome.trace, manifest),
        garbage_cells=audit_garbage(outcome.initial, outcome.store, manifest),
        steps=outcome.trace.steps,
        input_restored=not unrestored_inputs(outcome.initial, outcome.store, manifest),
        input_writes=count_input_writes(outcome.trace, manifest),
    )


def _fits_one_ratio(ratios: Sequence[float]) -> bool:
    if min(ratios) <= 0:
        return False
    return max(ratios) * (1 - BAND) <= min(ratios) * (1 + BAND)


def classify_growth(samples: Sequence[Tuple[int, float]]) -> str:
    """Classify ``(n, measurement)`` samples as constant, linear or logarithmic.

    Needs at least three distinct sizes covering two doublings.  Linear and
    logarithmic fits accept any common ratio within the +/-25% band.
    """
    sizes = sorted({n for n, _ in samples})
    if len(sizes) < 3 or sizes[0] < 1 or sizes[-1] < 4 * sizes[0]:
        raise InsufficientSamples(
            "need at least 3 sizes spanning 2 doublings, got " + str(sizes))
    values = [m for _, m in samples]
    if all(v == values[0] for v in values):
        return CONSTANT
    if _fits_one_ratio([m / n for n, m in samples]):
        return LINEAR
    if all(n >= 2 for n, _ in samples) and _fits_one_ratio([m / math.log2(n) for n, m in samples]):
        return LOGARITHMIC
    return UNCLASSIFIED
