"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line so ``pytest -s`` or the
plain ``pytest -v`` log shows the scoreboard at a glance.
"""

import dataclasses
import itertools
import random
import shutil
import time

import pytest

from fuzzgen import ProgramGen
from revsearch import FORWARD, Machine, RuntimeFault, invert_procedure, parse, pretty
from revsearch.bench import bench
from revsearch.corpus import CORPUS_DIR, case, load_cases
from revsearch.interpreter import DELOCAL_MISMATCH, FI_ASSERTION
from revsearch.oracle import binary_oracle, ceil_log2
from revsearch.syntax import BinOp, Index, Swap, Update, Var
from revsearch.verify import GARBAGE, ROUND_TRIP, verify_case

ROUND_TRIP_CASES = ["srch1", "srch2", "srch3", "srch_count", "srch_list_garbage",
                    "srch_list_reverse", "log2ceil", "bsrch"]
ZERO_GARBAGE_CASES = ["srch1", "srch2", "srch3", "srch_count", "srch_list_reverse", "bsrch"]
LINEAR_CASES = ["srch1", "srch2", "srch3", "srch_count"]
TRIALS = 1000
SEED = 2024


@pytest.fixture
def scoreboard(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail
    return emit


# -- shared runs

@pytest.fixture(scope="module")
def random_runs():
    """1000 seeded random inputs per program, forward then backward."""
    start = time.perf_counter()
    results = {name: verify_case(case(name), TRIALS, seed=SEED, max_n=512) for name in ROUND_TRIP_CASES}
    return results, time.perf_counter() - start


def _forward(c, machine, keys, k):
    out = machine.run(c.entry, c.store(keys, k), FORWARD, c.roles)
    return out.store[c.output], out.metrics


def _sweep(name, inputs):
    """Run every input forward; collect oracle disagreements and garbage."""
    c = case(name)
    machine = Machine(c.program)
    wrong, dirty, runs = [], [], 0
    for keys, k in inputs:
        got, m = _forward(c, machine, keys, k)
        runs += 1
        if got != c.expected(keys, k):
            wrong.append((keys, k, got))
        if m.garbage_cells or not m.input_restored:
            dirty.append((keys, k, m.garbage_cells))
    return {"runs": runs, "wrong": wrong, "dirty": dirty}


def bsrch_inputs():
    # literal: every sorted distinct-key array over 0..2n with every probe, n <= 6
    for n in range(1, 7):
        universe = range(2 * n + 1)
        for keys in itertools.combinations(universe, n):
            for k in universe:
                yield list(keys), k
    # every rank class up to n = 64: odd keys leave a gap before each key and
    # after the last, so probes 0..2n hit each position and each gap once
    for n in range(1, 65):
        keys = [2 * i + 1 for i in range(n)]
        for k in range(2 * n + 1):
            yield keys, k


def linear_inputs():
    # literal: every array over 0..7 with n <= 4 and every probe
    for n in range(0, 5):
        for keys in itertools.product(range(8), repeat=n):
            for k in range(8):
                yield list(keys), k
    # every equality pattern up to n = 8: which positions hold k is all the
    # programs can observe about the keys
    for n in range(5, 9):
        for mask in range(2 ** n):
            for k in range(8):
                other = (k + 1) % 8
                yield [k if mask >> i & 1 else other for i in range(n)], k


@pytest.fixture(scope="module")
def exhaustive_runs():
    runs = {"bsrch": _sweep("bsrch", bsrch_inputs())}
    for name in LINEAR_CASES:
        runs[name] = _sweep(name, linear_inputs())
    return runs


# -- the reduction behind the class sweeps

def _key_reads(node, keyed, parent=None, found=None):
    """Yield (index node, parent) for every element access of a key array."""
    found = [] if found is None else found
    if isinstance(node, Index) and node.name in keyed:
        found.append((node, parent))
    if dataclasses.is_dataclass(node):
        for f in dataclasses.fields(node):
            _key_reads(getattr(node, f.name), keyed, node, found)
    elif isinstance(node, tuple):
        for item in node:
            _key_reads(item, keyed, parent, found)
    return found


@pytest.mark.parametrize("name, keyed", [
    ("bsrch", {"in"}), ("srch1", {"r"}), ("srch2", {"head"}), ("srch3", {"head"}), ("srch_count", {"r"}),
])
def test_keys_are_only_compared_with_the_probe(name, keyed):
    program = case(name).program.program
    reads = _key_reads(program.procedures, keyed)
    assert reads
    for index, parent in reads:
        assert isinstance(parent, BinOp) and parent.op in ("=", "!=", "<", "<=", ">", ">="), parent
        assert Var("k") in (parent.left, parent.right), parent
        assert not isinstance(parent, (Update, Swap))


def test_random_sorted_files_agree_too():
    c = case("bsrch")
    machine = Machine(c.program)
    rng = random.Random(SEED)
    for _ in range(2000):
        n = rng.randint(1, 64)
        keys = sorted(rng.sample(range(2 * n + 1), n))
        k = rng.randrange(2 * n + 1)
        got, _ = _forward(c, machine, keys, k)
        want = binary_oracle(keys, k)
        assert got == (-1 if want is None else want)


# -- criteria

def test_criterion_1_round_trip(random_runs, scoreboard):
    results, elapsed = random_runs
    failed = [f"{name}: {r.detail}" for name, rs in results.items() for r in rs
              if r.check == ROUND_TRIP and not r.passed]
    trials = sum(r.trials for rs in results.values() for r in rs if r.check == ROUND_TRIP)
    ok = not failed and trials == TRIALS * len(ROUND_TRIP_CASES) and elapsed < 60
    scoreboard(1, "forward-then-backward restores the store", ok,
               f"{trials} trials in {elapsed:.1f}s" + ("; " + "; ".join(failed) if failed else ""))


def test_criterion_2_oracle_exhaustive(exhaustive_runs, scoreboard):
    wrong = {name: r["wrong"][:3] for name, r in exhaustive_runs.items() if r["wrong"]}
    runs = sum(r["runs"] for r in exhaustive_runs.values())
    scoreboard(2, "agreement with the oracles on every input class", not wrong,
               f"{runs} runs" + (f"; disagreements {wrong}" if wrong else ""))


def test_criterion_3_zero_garbage(random_runs, exhaustive_runs, scoreboard):
    results, _ = random_runs
    problems = [f"{name}: {r.detail}" for name in ZERO_GARBAGE_CASES for r in results[name]
                if r.check == GARBAGE and not r.passed]
    missing = [name for name in ZERO_GARBAGE_CASES if not any(r.check == GARBAGE for r in results[name])]
    problems += [f"{name}: {r['dirty'][:3]}" for name, r in exhaustive_runs.items() if r["dirty"]]
    problems += [f"{name}: garbage not audited" for name in missing]
    scoreboard(3, "no garbage and inputs restored", not problems, "; ".join(problems))


FROZEN_AUX = {"srch1": 0, "srch2": 1, "srch3": 2, "bsrch": 5}


def test_criterion_4_constant_aux(scoreboard):
    seen = {}
    for name in FROZEN_AUX:
        c = case(name)
        machine = Machine(c.program)
        seen[name] = {n: _forward(c, machine, *c.failure_input(n))[1].aux_highwater_cells
                      for n in (8, 64, 512)}
    ok = all(set(by_n.values()) == {FROZEN_AUX[name]} for name, by_n in seen.items())
    scoreboard(4, "auxiliary high-water constant in n", ok, str(seen))


def _halving_probes(n, keys, k):
    lo, hi, probes = 0, 2 ** ceil_log2(n), 0
    while hi - lo > 1:
        m = lo + (hi - lo) // 2
        probes += m < n
        if m >= n or keys[m] > k:
            hi = m
        else:
            lo = m
    return probes


def test_criterion_5_binary_asymmetry(scoreboard):
    c = case("bsrch")
    machine = Machine(c.program)
    rng = random.Random(SEED)
    inputs = [([2 * i + 1 for i in range(n)], k) for n in range(1, 65) for k in range(2 * n + 1)]
    for _ in range(300):
        n = rng.randint(1, 512)
        inputs.append((sorted(rng.sample(range(2 * n + 1), n)), rng.randrange(2 * n + 1)))
    bad = []
    for keys, k in inputs:
        n = len(keys)
        one_pass = machine.run("bsrch1", {"in": keys, "u": 0, "k": k, "len": ceil_log2(n)})
        r = one_pass.trace.reads.get("in", 0)
        total = _forward(c, machine, keys, k)[1].input_reads
        hit = binary_oracle(keys, k) is not None
        want = r + 1 if hit else 2 * r + 1
        if total != want or r != _halving_probes(n, keys, k) or r > ceil_log2(n):
            bad.append((n, k, r, total))
    scoreboard(5, "binary search reads R+1 on hits, 2R+1 on misses", not bad,
               f"{len(inputs)} inputs" + (f"; {bad[:3]}" if bad else ""))


def test_criterion_6_linear_flag_asymmetry(scoreboard):
    s2, s3 = case("srch2"), case("srch3")
    m2, m3 = Machine(s2.program), Machine(s3.program)
    bad = []
    for n in range(1, 65):
        keys = list(range(1, n + 1))
        for j in range(n):
            k = keys[j]
            r2 = _forward(s2, m2, keys, k)[1].input_reads
            r3 = _forward(s3, m3, keys, k)[1].input_reads
            if abs(r3 - 2 * r2) > 2 or r2 != 4 * j + 2:
                bad.append(("hit", n, j, r2, r3))
        r2 = _forward(s2, m2, keys, 0)[1].input_reads
        r3 = _forward(s3, m3, keys, 0)[1].input_reads
        if abs(r3 - r2) > 2 or r2 != 4 * n + 1:
            bad.append(("miss", n, r2, r3))
    scoreboard(6, "flag search scans twice on hits, once on misses", not bad, str(bad[:3]) if bad else "")


EXPECTED_CELLS = {
    ("1-i-b", "aux_highwater_cells"): "constant",
    ("1-ii-b", "aux_highwater_cells"): "constant",
    ("1-i-a", "aux_highwater_cells"): "constant",
    ("1-i-a", "input_reads"): "linear",
    ("2-iii-b", "garbage_cells"): "linear",
    ("3-ii-c", "aux_highwater_cells"): "constant",
    ("3-iii-c-mutable", "aux_highwater_cells"): "constant",
    ("bsrch", "steps"): "logarithmic",
}


def test_criterion_7_growth_classes(scoreboard):
    report = bench(sizes=(8, 64, 512))
    observed = {(c.case_id or c.case, c.metric): c.observed for c in report.classifications}
    wrong = {cell: observed.get(cell) for cell, want in EXPECTED_CELLS.items() if observed.get(cell) != want}
    ok = not wrong and report.ok
    scoreboard(7, "growth classes at n = 8, 64, 512", ok,
               f"{len(EXPECTED_CELLS)} cells" + (f"; mismatched {wrong}" if wrong else ""))


# -- mutants

LEAKY_SRCH3 = """procedure srch2(int head[], int next[], int prev[], int k, int l)
  from l = 0 loop
    local int t = next[l]
      l ^= prev[t] ^ t
    delocal int t = l
  until next[l] = -1 || k = head[l]

procedure srch3(int head[], int next[], int prev[], int k, int f, int l)
  call srch2(head, next, prev, k, l)
  if l = size(head) - 1 then
    l ^= size(head) - 1
  else
    f ^= 1
  fi f != 1
"""


def _mutant_corpus(tmp_path, name, manifest, source):
    directory = tmp_path / name
    directory.mkdir()
    shutil.copy(CORPUS_DIR / manifest, directory / manifest)
    (directory / f"{name}.jns").write_text(source)
    (c,) = load_cases(directory)
    return verify_case(c, 200, seed=SEED, max_n=64)


def test_criterion_8_mutants_are_caught(tmp_path, scoreboard):
    bsrch_src = (CORPUS_DIR / "bsrch.jns").read_text()
    srch2_src = (CORPUS_DIR / "srch2.jns").read_text()
    assert "fi u = -1" in bsrch_src and "delocal int t = l" in srch2_src
    mutants = {
        "srch3": (_mutant_corpus(tmp_path, "srch3", "3-ii-c.json", LEAKY_SRCH3), GARBAGE, "garbage_cells="),
        "bsrch": (_mutant_corpus(tmp_path, "bsrch", "bsrch.json", bsrch_src.replace("fi u = -1", "fi u != -1")),
                  None, FI_ASSERTION),
        "srch2": (_mutant_corpus(tmp_path, "srch2", "1-ii-b.json",
                                 srch2_src.replace("delocal int t = l", "delocal int t = l + 1")),
                  None, DELOCAL_MISMATCH),
    }
    caught = []
    for name, (results, check, evidence) in mutants.items():
        failing = [r for r in results if not r.passed and (check is None or r.check == check)]
        if any(evidence in r.detail for r in failing):
            caught.append(name)
    scoreboard(8, "mutants fail with the expected error", len(caught) == 3, f"{len(caught)}/3 caught")


def test_mutant_without_uncall_faults_at_delocal():
    # deleting only the uncall leaves l nonzero at its delocal on hits
    src = (CORPUS_DIR / "srch3.jns").read_text()
    mutant = "\n".join(line for line in src.splitlines() if "uncall srch2" not in line)
    c = case("srch3")
    with pytest.raises(RuntimeFault) as err:
        Machine(parse(mutant)).run(c.entry, c.store([7, 3, 9], 3))
    assert err.value.kind == DELOCAL_MISMATCH


def test_criterion_9_parser_and_inverter(scoreboard):
    problems = []
    for path in sorted(CORPUS_DIR.glob("*.jns")):
        program = parse(path.read_text())
        text = pretty(program)
        if parse(text) != program or pretty(parse(text)) != text:
            problems.append(f"{path.name}: pretty/parse")
        for proc in program.procedures:
            if invert_procedure(invert_procedure(proc)) != proc:
                problems.append(f"{path.name}:{proc.name}: invert twice")
    rng = random.Random(SEED)
    for i in range(100):
        program = ProgramGen(rng).program()
        text = pretty(program)
        if parse(text) != program or pretty(parse(text)) != text:
            problems.append(f"fuzz {i}: pretty/parse")
        if any(invert_procedure(invert_procedure(p)) != p for p in program.procedures):
            problems.append(f"fuzz {i}: invert twice")
    scoreboard(9, "parse/pretty fixpoint and double inversion", not problems, "; ".join(problems[:3]))
