"""Acceptance criteria, one test each.

Every test appends a PASS/FAIL line to ``ACCEPTANCE_LINES`` (printed in the
terminal summary) before asserting, so the report is complete even when a
criterion fails.
"""
import itertools
import time

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from strategies import as_pairs
from revtest.bench import (BenchConfig, RngSpec, bench, five_vector_circuit, random_circuit,
                           summarize)
from revtest.circuit import Circuit, simulate
from revtest.completeness import check
from revtest.constructive import (bounds, gen_cell_backsolve, gen_greedy, gen_inverse_complement, gen_linear,
                                  stuck_at_staircase)
from revtest.cover import CoverProblem, compact, min_test_set, min_test_solution, solve_exact
from revtest.faults import (LevelSite, MultipleFault, StuckAtFault, detection_matrix,
                            enumerate_faults, inject_batch)

# reference minimal-test-size distribution: rows are sizes 2, 3, 4; columns
# are optimal lengths 0..8
REFERENCE_TABLE = [
    [1, 6, 24, 67, 134, 155, 105, 21, 0],
    [0, 6, 78, 558, 2641, 8727, 16854, 10185, 577],
    [0, 0, 0, 0, 5, 39, 90, 47, 0],
]
OPTIMAL_HISTOGRAM = [1, 12, 102, 625, 2780, 8921, 17049, 10253, 577]
SWEEP_NS = (8, 16, 24, 32)
SWEEP_LENGTHS = (100, 200, 400, 800, 1600)


def report(num, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _circuits(count, n_range, len_range, key, library="nct"):
    """Deterministic random circuits with n and length drawn per index."""
    rng = RngSpec(2024).stream(key)
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        length = int(rng.integers(len_range[0], len_range[1] + 1))
        yield random_circuit(n, length, RngSpec(i, "philox"), library)


def test_01_three_wire_golden(three_wire):
    t0 = time.perf_counter()
    tests, sol = min_test_solution(three_wire, "sa")
    elapsed = time.perf_counter() - t0
    ok = (len(tests) == 3 and sol.optimal and sol.lower_bound == 3
          and check(three_wire, ["000", "010", "111"]).complete and elapsed < 1.0)
    report(1, "three-wire minimal stuck-at size", ok,
           f"size {len(tests)}, lower bound {sol.lower_bound}, {elapsed * 1000:.1f} ms")
    assert ok


def test_02_empty_circuit_law():
    sizes = [len(min_test_set(Circuit(n))) for n in range(1, 9)]
    complete = all(check(Circuit(n), [0, (1 << n) - 1]).complete for n in range(1, 9))
    ok = sizes == [2] * 8 and complete
    report(2, "empty circuit needs exactly {0..0, 1..1}", ok, f"sizes {sizes}")
    assert ok


def test_03_optimal_catalog():
    t0 = time.perf_counter()
    from revtest.bench import enumerate_optimal_3wire, size_table
    cat = enumerate_optimal_3wire()
    tab = size_table(cat, "sa")
    elapsed = time.perf_counter() - t0
    matrix = tab.matrix()
    hist = cat.histogram()
    col_sums = np.array(matrix).sum(axis=0).tolist()
    dev = np.abs(np.array(matrix) - np.array(REFERENCE_TABLE))
    ok = (hist == OPTIMAL_HISTOGRAM and sum(hist) == 40320 and len(hist) - 1 == 8
          and tab.max_size == 4 and col_sums == OPTIMAL_HISTOGRAM and elapsed < 120)
    report(3, "optimal 3-wire catalog and test-size table", ok,
           f"histogram exact, max size {tab.max_size}, column sums exact, "
           f"row deviations by length {dev.sum(axis=0).tolist()}, {elapsed:.1f} s")
    for size, row in zip(tab.as_json()["sizes"], matrix):
        print(f"    size {size}: {row}")
    assert ok


def test_04_pin_fault_counts():
    bad = 0
    for c in _circuits(1000, (3, 32), (0, 200), 4):
        xs = RngSpec(4).stream(c.n, len(c.gates)).integers(0, 1 << c.n, size=8, dtype=np.uint64)
        u = enumerate_faults(c, "sa", "pin")
        good = np.array([simulate(c, int(x)) for x in xs], dtype=np.uint64)
        hit = inject_batch(c, xs, [MultipleFault((f,)) for f in u.faults]) != good[None, :]
        bad += int((hit.sum(axis=0) != c.n + sum(c.sizes)).sum())
    for n in range(3, 9):
        c = random_circuit(n, 12, n)
        xs = np.arange(1 << n, dtype=np.uint64)
        m = detection_matrix(c, xs, enumerate_faults(c, "sa", "pin"))
        bad += int((m.sum(axis=1) != 1 << (n - 1)).sum())
        bad += int((m.sum(axis=0) != n + sum(c.sizes)).sum())
    ok = bad == 0
    report(4, "each vector detects n+sum(k) pin faults; each fault 2^(n-1) inputs", ok,
           f"{bad} mismatches over 1000 sampled + 6 exhaustive circuits")
    assert ok


def test_05_cell_fault_counts():
    bad = 0
    for c in _circuits(1000, (3, 32), (0, 200), 5):
        xs = RngSpec(5).stream(c.n, len(c.gates)).integers(0, 1 << c.n, size=8, dtype=np.uint64)
        m = detection_matrix(c, xs, enumerate_faults(c, "cell"))
        bad += int((m.sum(axis=0) != len(c.gates)).sum())
    for n in range(3, 9):
        c = random_circuit(n, 12, n)
        xs = np.arange(1 << n, dtype=np.uint64)
        u = enumerate_faults(c, "cell")
        m = detection_matrix(c, xs, u)
        expect = np.array([1 << (n - f.size) for f in u.faults])
        bad += int((m.sum(axis=1) != expect).sum())
        # independent check of the patterns themselves
        for x in range(0, 1 << n, 17):
            pats = [oracles.unbits(p) for p in oracles.gate_inputs(n, as_pairs(c), x)]
            seen = [(f.gate, f.pattern) for f, hit in zip(u.faults, m[:, x]) if hit]
            bad += seen != list(enumerate(pats))
    ok = bad == 0
    report(5, "each vector meets l cell requirements; each 2^(n-k) inputs", ok,
           f"{bad} mismatches")
    assert ok


def test_06_multiple_faults_no_escapes():
    rng = RngSpec(6).stream()
    escapes = total = 0
    for c in _circuits(100, (3, 8), (1, 30), 6):
        tests = np.array(min_test_set(c, "sa"), dtype=np.uint64)
        sites = [LevelSite(j, w) for j in range(c.depth + 1) for w in range(c.n)]
        mfs = []
        for _ in range(10_000):
            k = int(rng.integers(2, min(8, len(sites)) + 1))
            pick = rng.choice(len(sites), size=k, replace=False)
            pol = rng.integers(0, 2, size=k)
            mfs.append(MultipleFault(tuple(StuckAtFault(sites[i], int(p))
                                           for i, p in zip(pick, pol))))
        good = np.array([simulate(c, int(x)) for x in tests], dtype=np.uint64)
        faulty = inject_batch(c, tests, mfs)
        escapes += int((~(faulty != good[None, :]).any(axis=1)).sum())
        total += len(mfs)
    ok = escapes == 0
    report(6, "minimal stuck-at sets catch random multiple faults", ok,
           f"{escapes} escapes out of {total}")
    assert ok


def test_07_construction_bounds():
    bad_ic = sum(1 for c in _circuits(500, (3, 32), (0, 200), 71)
                 if not (len(t := gen_inverse_complement(c)) <= c.depth + 2
                         and check(c, t).complete))
    bad_gr = 0
    for c in _circuits(100, (3, 12), (0, 60), 72):
        t = gen_greedy(c, "sa", mode="exact")
        bad_gr += not (len(t) <= stuck_at_staircase(c.n, c.sizes) and check(c, t).complete)
    bad_lin = 0
    for c in _circuits(200, (2, 32), (0, 200), 73, library="cnot"):
        t = gen_linear(c)
        bad_lin += not (len(t) == c.n + 1 and check(c, t).complete)
    ok = bad_ic == bad_gr == bad_lin == 0
    report(7, "construction sizes within their bounds", ok,
           f"inverse-complement {bad_ic}/500, greedy {bad_gr}/100, linear {bad_lin}/200 violations")
    assert ok


def test_08_bound_calculators():
    sa = bounds(None, "sa", n=64, sizes={3: 10**6})
    cell = bounds(None, "cell", n=64, sizes={3: 10**6})
    ok = (sa.bound_c == 23 and abs(cell.iterated_bound - 108) <= 1
          and 108 <= cell.expected_bound <= 112)
    report(8, "bound calculators for 64 wires and 10^6 Toffoli gates", ok,
           f"stuck-at {sa.bound_c}, cell iterated {cell.iterated_bound}, "
           f"expected {cell.expected_bound:.2f}")
    assert ok


def test_09_three_wire_cell_minimum(three_wire):
    exhaustive = oracles.min_size(3, as_pairs(three_wire), "cell")
    solved = len(min_test_set(three_wire, "cell"))
    ok = exhaustive == solved == 4
    report(9, "three-wire minimal cell test size", ok, f"solver {solved}, exhaustive {exhaustive}")
    assert ok


@pytest.mark.slow
def test_10_decomposition_sweep():
    t0 = time.perf_counter()
    failures, worst = [], {}
    for model in ("sa", "cell"):
        cfg = BenchConfig(SWEEP_NS, SWEEP_LENGTHS, circuits=20, m=8, model=model, compact=False)
        try:
            records = bench(cfg)
        except AssertionError as e:  # run_point checks every set against the full circuit
            failures.append(str(e))
            continue
        for p in summarize(records):
            margin = p.bound - p.mean_pre
            worst[model] = min(worst.get(model, margin), margin)
            if p.mean_pre > p.bound:
                failures.append(f"{model} n={p.n} l={p.length}: {p.mean_pre:.2f} > {p.bound:.2f}")
            print(f"    {model:4} n={p.n:2} l={p.length:4}: mean {p.mean_pre:6.2f}  "
                  f"bound {p.bound:6.2f}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30 * 60
    report(10, "decomposition sweep complete and under the staircase", ok,
           f"{len(SWEEP_NS) * len(SWEEP_LENGTHS) * 20} circuits per model, smallest margin "
           + ", ".join(f"{m} {v:.2f}" for m, v in worst.items())
           + f", {elapsed / 60:.1f} min" + (f"; {failures[:3]}" if failures else ""))
    assert ok


def test_11_compaction():
    grew = incomplete = 0
    for i, c in enumerate(_circuits(200, (3, 10), (0, 40), 11)):
        model = ("sa", "cell")[i % 2]
        rng = RngSpec(11).stream(i)
        base = gen_cell_backsolve(c) if model == "cell" else gen_inverse_complement(c)
        extra = rng.integers(0, 1 << c.n, size=5).tolist()
        start = list(dict.fromkeys([*base, *extra]))
        out = compact(c, start, model)
        grew += len(out) > len(start)
        incomplete += not check(c, out, model).complete
    rng = RngSpec(11).stream(1000)
    disagree = 0
    for _ in range(1000):
        n_rows = int(rng.integers(1, 11))
        n_cols = int(rng.integers(1, 13))
        cols = rng.integers(0, 1 << n_rows, size=n_cols).tolist()
        costs = [1] * n_cols
        best = oracles.min_cover(n_rows, cols, costs)
        if best is None:
            continue
        sol = solve_exact(CoverProblem(n_rows, tuple(cols), tuple(costs)))
        disagree += not (sol.optimal and sol.objective == best)
    ok = grew == incomplete == disagree == 0
    report(11, "compaction and exact cover agreement", ok,
           f"grew {grew}, incomplete {incomplete}, solver disagreements {disagree}/1000")
    assert ok


def test_12_five_vector_witness():
    c = five_vector_circuit()
    tests, sol = min_test_solution(c)
    none4 = not any(check(c, q).complete for q in itertools.combinations(range(8), 4))
    ok = c.n == 3 and len(tests) == 5 and sol.optimal and none4
    report(12, "3-wire circuit needing five vectors", ok,
           f"{len(c.gates)} gates, minimum {len(tests)}, no 4-subset complete: {none4}")
    assert ok
