"""Reversible search programs, their input layouts and role manifests.

Each ``<case>.json`` manifest names a ``.jns`` source, the entry procedure,
the file representation it expects, what kind of answer it produces, and
which entry parameters are input, output or declared garbage.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..checker import CheckedProgram, check
from ..metrics import RoleManifest
from ..oracle import binary_oracle, ceil_log2, linear_oracle
from ..parser import parse

CORPUS_DIR = Path(__file__).resolve().parent

ARRAY = "array-with-sentinel"
DLIST = "dlist"
LIST = "list"
SORTED_ARRAY = "sorted-array"
SIZE = "size"
REPRESENTATIONS = (ARRAY, DLIST, LIST, SORTED_ARRAY, SIZE)

NUMBER = "number"
LOCATION = "location"
FLAG = "flag"
INDEX_OR_MINUS_ONE = "index-or-minus-one"
CEIL_LOG2 = "ceil-log2"
OUTPUT_KINDS = (NUMBER, LOCATION, FLAG, INDEX_OR_MINUS_ONE, CEIL_LOG2)

_RESOURCE = {1: "one traversal, G = 0", 2: "one traversal, G >= 0", 3: "one or two traversals, G = 0"}
_SHAPE = {"i": "array", "ii": "dlist", "iii": "list"}
_ANSWER = {"a": NUMBER, "b": LOCATION, "c": FLAG}

# Linear-search cells that have a program here.  Impossible combinations
# have no program and cannot be named.
IMPLEMENTED_CASES = frozenset({
    (1, "i", "a", ""), (1, "i", "b", ""), (1, "ii", "b", ""),
    (2, "iii", "b", ""),
    (3, "ii", "c", ""), (3, "iii", "c", "mutable"),
})


@dataclass(frozen=True)
class CaseId:
    resource: int
    representation: str
    output: str
    variant: str = ""

    def __post_init__(self):
        if (self.resource, self.representation, self.output, self.variant) not in IMPLEMENTED_CASES:
            raise ValueError(f"no program for case {self}")

    @classmethod
    def parse(cls, text: str) -> "CaseId":
        parts = text.split("-")
        if len(parts) not in (3, 4) or not parts[0].isdigit():
            raise ValueError(f"malformed case id {text!r}")
        return cls(int(parts[0]), parts[1], parts[2], parts[3] if len(parts) == 4 else "")

    def __str__(self) -> str:
        base = f"{self.resource}-{self.representation}-{self.output}"
        return f"{base}-{self.variant}" if self.variant else base

    def describe(self) -> str:
        variant = f" ({self.variant})" if self.variant else ""
        return (f"({self.resource}) {_RESOURCE[self.resource]}; "
                f"{_SHAPE[self.representation]}{variant}; {_ANSWER[self.output]}")


@dataclass(frozen=True)
class FileSpec:
    """A file of ``keys`` and the key to search for, in one of the layouts.

    Linked layouts put record i at index i with the sentinel (holding the
    searched key) at index n and -1 as the null pointer.
    """

    representation: str
    keys: Tuple[int, ...]
    key: int
    sorted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "keys", tuple(self.keys))
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.sorted and any(a >= b for a, b in zip(self.keys, self.keys[1:])):
            raise ValueError("sorted file must be strictly increasing")

    def materialize(self) -> Dict[str, object]:
        keys = list(self.keys)
        n = len(keys)
        if self.representation == ARRAY:
            return {"r": keys + [self.key], "n": n}
        if self.representation == SORTED_ARRAY:
            return {"in": keys}
        if self.representation == SIZE:
            return {"n": n}
        nxt = list(range(1, n + 1)) + [-1]
        if self.representation == LIST:
            return {"head": keys + [self.key], "next": nxt}
        prev = [-1] + list(range(n))
        return {"head": keys + [self.key], "next": nxt, "prev": prev}


@dataclass(frozen=True)
class Case:
    name: str
    source: Path
    entry: str
    representation: str
    output_kind: str
    roles: RoleManifest
    zero_garbage: bool
    case_id: Optional[CaseId] = None
    growth: Dict[str, str] = field(default_factory=dict, hash=False, compare=False)

    @classmethod
    def from_manifest(cls, path) -> "Case":
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        roles = data.get("roles", {})
        if data["representation"] not in REPRESENTATIONS:
            raise ValueError(f"{path}: unknown representation {data['representation']!r}")
        if data["output_kind"] not in OUTPUT_KINDS:
            raise ValueError(f"{path}: unknown output kind {data['output_kind']!r}")
        return cls(
            name=data["name"],
            source=path.parent / data["source"],
            entry=data["entry"],
            representation=data["representation"],
            output_kind=data["output_kind"],
            roles=RoleManifest(frozenset(roles.get("input", ())),
                               frozenset(roles.get("output", ())),
                               frozenset(roles.get("garbage", ()))),
            zero_garbage=bool(data.get("zero_garbage", True)),
            case_id=CaseId.parse(data["case"]) if data.get("case") else None,
            growth=dict(data.get("growth", {})),
        )

    @property
    def label(self) -> str:
        return f"{self.name} [{self.case_id}]" if self.case_id else self.name

    @cached_property
    def program(self) -> CheckedProgram:
        return load_program(self.source)

    @property
    def output(self) -> str:
        (name,) = self.roles.output
        return name

    def file(self, keys: Sequence[int], k: int) -> FileSpec:
        return FileSpec(self.representation, tuple(keys), k, sorted=self.representation == SORTED_ARRAY)

    def store(self, keys: Sequence[int], k: int) -> Dict[str, object]:
        """Initial binding for the entry procedure: the materialized file,
        the key, and zeros for every other parameter (arrays get n+1 cells)."""
        bound = self.file(keys, k).materialize()
        if self.representation != SIZE:
            bound["k"] = k
        proc = self.program[self.entry]
        for p in proc.params:
            if p.name not in bound:
                bound[p.name] = [0] * (len(keys) + 1) if p.is_array else 0
        return bound

    def expected(self, keys: Sequence[int], k: int) -> int:
        """The answer the oracle predicts for the output cell."""
        n = len(keys)
        if self.output_kind == INDEX_OR_MINUS_ONE:
            found = binary_oracle(keys, k)
            return -1 if found is None else found
        if self.output_kind == CEIL_LOG2:
            return ceil_log2(n)
        answer = linear_oracle(keys, k)
        if self.output_kind == NUMBER:
            return answer.count
        if self.output_kind == FLAG:
            return int(answer.found)
        return n if answer.first is None else answer.first

    def random_input(self, rng: random.Random, max_n: int = 512) -> Tuple[List[int], int]:
        """Keys drawn from 0..2n, with the probe present about half the time."""
        min_n = 1 if self.representation in (SORTED_ARRAY, SIZE) else 0
        n = rng.randint(min_n, max_n)
        universe = 2 * n + 1
        if self.representation == SORTED_ARRAY:
            keys = sorted(rng.sample(range(universe), n))
        else:
            keys = [rng.randrange(universe) for _ in range(n)]
        if keys and rng.random() < 0.5:
            k = rng.choice(keys)
        else:
            absent = sorted(set(range(universe)) - set(keys))
            k = rng.choice(absent)
        return keys, k

    def failure_input(self, n: int) -> Tuple[List[int], int]:
        """A deterministic miss: odd keys 1, 3, ..., 2n-1 and probe 2n."""
        return [2 * i + 1 for i in range(n)], 2 * n


def load_program(path) -> CheckedProgram:
    return check(parse(Path(path).read_text(encoding="utf-8")))


def load_cases(directory=None) -> List[Case]:
    directory = Path(directory) if directory is not None else CORPUS_DIR
    return [Case.from_manifest(p) for p in sorted(directory.glob("*.json"))]


def case(name: str, directory=None) -> Case:
    for c in load_cases(directory):
        if c.name == name or (c.case_id and str(c.case_id) == name):
            return c
    raise KeyError(name)


def sources(directory=None) -> Dict[str, str]:
    directory = Path(directory) if directory is not None else CORPUS_DIR
    return {p.name: p.read_text(encoding="utf-8") for p in sorted(directory.glob("*.jns"))}
