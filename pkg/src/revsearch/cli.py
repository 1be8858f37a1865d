"""Command-line interface.

Exit codes: 0 success, 1 runtime fault or failed verification, 2 usage,
parse or check errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .checker import CheckFailed, check
from .corpus import CORPUS_DIR
from .interpreter import (
    DEFAULT_FUEL, DIRECTIONS, FORWARD, BindingError, Machine, RuntimeFault, StepLog,
)
from .inverter import invert_procedure
from .metrics import SCHEMA_VERSION, ManifestMismatch, RoleManifest
from .parser import ParseError, parse
from .pretty import pretty

EXIT_OK = 0
EXIT_FAULT = 1
EXIT_USAGE = 2

_INT = r"-?[0-9]+"
_BIND_RE = re.compile(rf"^([A-Za-z_][A-Za-z0-9_]*)=(?:({_INT})|\[\s*((?:{_INT}\s*(?:,\s*{_INT}\s*)*)?)\])$")


class UsageError(Exception):
    pass


def parse_binding(text: str):
    """``name=v`` or ``name=[v, ...]`` with decimal 64-bit integers."""
    m = _BIND_RE.match(text.replace(" ", ""))
    if m is None:
        raise UsageError(f"bad binding {text!r}; use name=value or name=[v,...]")
    name, scalar, items = m.groups()
    values = [int(scalar)] if scalar is not None else [int(v) for v in items.split(",") if v]
    for v in values:
        if not -2 ** 63 <= v < 2 ** 63:
            raise UsageError(f"{v} in {name} does not fit in 64 bits")
    return name, (values[0] if scalar is not None else values)


def resolve_source(path: str) -> Path:
    """Paths under ``corpus/`` fall back to the packaged corpus."""
    p = Path(path)
    if not p.exists() and p.parts and p.parts[0] == "corpus":
        packaged = CORPUS_DIR.joinpath(*p.parts[1:])
        if packaged.exists():
            return packaged
    return p


def load(path: str):
    p = resolve_source(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}")
    return check(parse(text))


def load_roles(path: str) -> RoleManifest:
    p = resolve_source(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, ValueError) as err:
        raise UsageError(f"cannot read manifest {path}: {err}")
    roles = data.get("roles", data)
    return RoleManifest(frozenset(roles.get("input", ())), frozenset(roles.get("output", ())),
                        frozenset(roles.get("garbage", ())))


# -- subcommands

def cmd_check(args) -> int:
    status = EXIT_OK
    for path in args.files:
        try:
            load(path)
        except CheckFailed as err:
            for e in err.errors:
                print(f"{path}:{e}", file=sys.stderr)
            status = EXIT_USAGE
        else:
            print(f"{path}: ok")
    return status


def _print_trace(log: StepLog) -> None:
    for span, delta in log.steps:
        changes = ", ".join(f"{k}: {a} -> {b}" for k, (a, b) in delta.items())
        print(f"trace {span}: {changes}", file=sys.stderr)


def cmd_run(args) -> int:
    program = load(args.file)
    entry = args.entry or program.program.procedures[-1].name
    if entry not in program:
        raise UsageError(f"no procedure named {entry} in {args.file}")
    store: Dict[str, object] = {}
    for text in args.bind:
        name, value = parse_binding(text)
        store[name] = value
    manifest = load_roles(args.metrics) if args.metrics else None
    tracer = StepLog() if args.trace else None
    machine = Machine(program, fuel=args.fuel, tracer=tracer)
    try:
        outcome = machine.run(entry, store, args.dir, manifest)
    except BindingError as err:
        raise UsageError(str(err))
    except ManifestMismatch as err:
        raise UsageError(f"manifest: {err}")
    finally:
        if tracer is not None:
            _print_trace(tracer)
    proc = program[entry]
    if outcome.metrics is not None:
        metrics = outcome.metrics.to_json(program=entry, direction=args.dir, outcome="ok")
    else:
        metrics = {"schema_version": SCHEMA_VERSION, "program": entry, "direction": args.dir,
                   "steps": outcome.trace.steps, "peak_locals": outcome.trace.peak_locals,
                   "array_reads": outcome.trace.reads, "outcome": "ok"}
    if args.json:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "entry": entry, "direction": args.dir,
                          "store": outcome.store, "metrics": metrics}, sort_keys=True))
    else:
        shown = [p.name for p in proc.params] + [n for n in outcome.store if proc.param(n) is None]
        for name in shown:
            print(f"{name} = {outcome.store[name]}")
        for key, value in metrics.items():
            if key not in ("schema_version", "program", "direction"):
                print(f"# {key}: {value}")
    return EXIT_OK


def cmd_invert(args) -> int:
    program = load(args.file).program
    if args.proc is not None:
        if args.proc not in program:
            raise UsageError(f"no procedure named {args.proc} in {args.file}")
        targets = [args.proc]
    else:
        targets = program.names()
    for name in targets:
        program = program.replace(invert_procedure(program[name]))
    sys.stdout.write(pretty(program))
    return EXIT_OK


def _sizes(text: str) -> List[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad size list {text!r}")
    if not sizes or min(sizes) < 1:
        raise UsageError("sizes must be positive integers")
    return sizes


def cmd_verify(args) -> int:
    from .verify import format_table, verify_corpus

    if args.trials <= 0:
        raise UsageError("trials must be positive")
    results = verify_corpus(args.corpus, trials=args.trials, seed=args.seed, max_n=args.max_n,
                            sizes=_sizes(args.sizes))
    if not results:
        raise UsageError(f"no manifests found in {args.corpus or CORPUS_DIR}")
    print(format_table(results))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_FAULT if failed else EXIT_OK


def cmd_bench(args) -> int:
    from .bench import bench, format_report
    from .metrics import InsufficientSamples

    try:
        report = bench(args.corpus, _sizes(args.sizes))
    except InsufficientSamples as err:
        raise UsageError(str(err))
    print(format_report(report, only_expected=not args.all))
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    if args.figures:
        from .plotting import plot_report

        for path in plot_report(report, args.figures):
            print(f"wrote {path}")
    mismatches = [c for c in report.classifications if not c.matches]
    print(f"{len(report.checked()) - len(mismatches)}/{len(report.checked())} expected classes reproduced")
    return EXIT_FAULT if mismatches else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revsearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and statically check sources")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run a procedure forward or backward")
    p.add_argument("file")
    p.add_argument("--entry", help="procedure to run (default: the last one in the file)")
    p.add_argument("--dir", choices=DIRECTIONS, default=FORWARD)
    p.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE",
                   help="bind a parameter: name=5 or name=[1,2,3]; repeatable")
    p.add_argument("--metrics", metavar="MANIFEST", help="role manifest (JSON) for M/G/read counts")
    p.add_argument("--json", action="store_true", help="print one JSON object")
    p.add_argument("--trace", action="store_true", help="log each update to stderr")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="step cap")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("invert", help="print the program with procedures inverted")
    p.add_argument("file")
    p.add_argument("--proc", help="invert only this procedure")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("verify", help="run the property suite over a corpus")
    p.add_argument("--corpus", default=None, help="corpus directory (default: packaged corpus)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=512)
    p.add_argument("--sizes", default="8,64,512", help="sizes for the M-constancy check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="classify metric growth over input sizes")
    p.add_argument("--corpus", default=None)
    p.add_argument("--sizes", default="8,64,512")
    p.add_argument("--json", metavar="OUT", help="write the JSON report here")
    p.add_argument("--figures", metavar="DIR", help="write growth plots (PNG) here")
    p.add_argument("--all", action="store_true", help="show every metric, not only expected ones")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"revsearch: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as err:
        print(f"revsearch: parse error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailed as err:
        for e in err.errors:
            print(f"revsearch: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeFault as err:
        print(f"revsearch: {err}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
