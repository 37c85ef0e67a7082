"""Closed-form test set constructions, greedy generation and size bounds."""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, simulate, simulate_inverse, wire_bit
from .completeness import TestSet, check
from .faults import CellFault, OutputPin, PinSite, enumerate_faults, detection_matrix, gate_patterns

EXACT_GREEDY_WIRES = 16
POOL_SIZE = 4096


def gen_enumerative(c: Circuit) -> TestSet:
    """Inputs 0 .. 2^(n-1): any 2^(n-1)+1 distinct vectors are complete."""
    if c.n > 20:
        raise CircuitError(f"enumerative construction limited to n <= 20, got {c.n}")
    return TestSet(c.n, range((1 << (c.n - 1)) + 1))


def gen_inverse_complement(c: Circuit) -> TestSet:
    """All-zeros, all-ones, and for each level the input that drives that
    level to the complement of what all-zeros drives it to."""
    full = c.full_mask
    vecs = [0, full]
    for i in range(1, c.depth + 1):
        vecs.append(simulate_inverse(c, ~simulate(c, 0, 0, i) & full, 0, i))
    return TestSet.dedup(c.n, vecs)


def gen_linear(c: Circuit) -> TestSet:
    """All-zeros plus the n weight-1 vectors; complete for C-NOT-only circuits."""
    bad = [i for i, g in enumerate(c.gates) if g.size != 2]
    if bad:
        raise CircuitError(f"linear construction needs C-NOT gates only; gate {bad[0]} is "
                           f"size {c.gates[bad[0]].size}")
    return TestSet(c.n, [0] + [wire_bit(w, c.n) for w in range(c.n)])


def _backsolve(c: Circuit, level: int, wires: Sequence[int], bits: Sequence[int]) -> int:
    """Input that puts ``bits`` on ``wires`` at ``level``, other wires 0."""
    state = 0
    for w, b in zip(wires, bits):
        if b:
            state |= wire_bit(w, c.n)
    return simulate_inverse(c, state, 0, level)


def _target_vector(c: Circuit, fault) -> int:
    if isinstance(fault, CellFault):
        g = c.gates[fault.gate]
        bits = [(fault.pattern >> (g.size - 1 - p)) & 1 for p in range(g.size)]
        return _backsolve(c, c.levels[fault.gate] - 1, g.wires, bits)
    site = fault.site
    if isinstance(site, PinSite):
        level, wire = c.levels[site.gate] - 1, c.gates[site.gate].wires[site.pin]
    elif isinstance(site, OutputPin):
        level, wire = c.depth, site.wire
    else:
        level, wire = site.level, site.wire
    return _backsolve(c, level, [wire], [1 - fault.polarity])


def gen_cell_backsolve(c: Circuit) -> TestSet:
    """Start from all-zeros; for each requirement still uncovered, add the
    input that forces the pattern on that gate (free wires 0)."""
    vecs = [0]
    seen = [set() for _ in c.gates]
    for g, a in enumerate(gate_patterns(c, [0])[0]):
        seen[g].add(int(a))
    for g, gate in enumerate(c.gates):
        for a in range(1 << gate.size):
            if a in seen[g]:
                continue
            v = _target_vector(c, CellFault(g, a, gate.size))
            vecs.append(v)
            for h, b in enumerate(gate_patterns(c, [v])[0]):
                seen[h].add(int(b))
    return TestSet.dedup(c.n, vecs)


def _cell_guarantee(covered_sizes: Counter, l: int) -> int:
    """l - floor(sum over covered requirements of 2^-k)."""
    s8 = sum(cnt << (3 - k) for k, cnt in covered_sizes.items())
    return l - s8 // 8


def gen_greedy(c: Circuit, model: str = "sa", mode: str = "auto", seed: int = 0,
               pool: int = POOL_SIZE) -> TestSet:
    """Repeatedly add the vector covering the most remaining faults.

    ``exact`` scores all 2^n inputs (n <= 16) and asserts the per-step
    guarantee; ``random`` scores a seeded pool plus one vector aimed at the
    first uncovered fault, so it always terminates.
    """
    if mode == "auto":
        mode = "exact" if c.n <= EXACT_GREEDY_WIRES else "random"
    if mode == "exact" and c.n > EXACT_GREEDY_WIRES:
        warnings.warn(f"exact greedy needs n <= {EXACT_GREEDY_WIRES}; using random pool",
                      RuntimeWarning, stacklevel=2)
        mode = "random"
    if model == "sa":
        universe = enumerate_faults(c, "sa", "pin")
    elif model == "cell":
        universe = enumerate_faults(c, "cell")
    else:
        raise ValueError(f"unknown fault model {model!r}")
    faults = universe.faults
    covered = np.zeros(len(faults), dtype=bool)
    chosen: list[int] = []
    l = len(c.gates)
    rng = np.random.Generator(np.random.Philox(seed))

    if mode == "exact":
        cand = np.arange(1 << c.n, dtype=np.uint64)
        hits = detection_matrix(c, cand, universe)
    while not covered.all():
        remaining = int((~covered).sum())
        if mode != "exact":
            first = faults[int(np.argmin(covered))]
            raw = rng.bit_generator.random_raw(pool).astype(np.uint64) & np.uint64(c.full_mask)
            cand = np.unique(np.append(raw, np.uint64(_target_vector(c, first))))
            hits = detection_matrix(c, cand, universe)
        gain = hits[~covered].sum(axis=0)
        best = int(np.argmax(gain))
        if mode == "exact":
            if model == "sa":
                assert 2 * int(gain[best]) >= remaining, "greedy step covered < half"
            else:
                done = Counter(f.size for f, hit in zip(faults, covered) if hit)
                assert int(gain[best]) >= min(remaining, _cell_guarantee(done, l))
        chosen.append(int(cand[best]))
        covered |= hits[:, best]
    if not chosen:
        chosen = [0]
    return TestSet(c.n, chosen)


# --- bounds ------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    model: str
    n: int
    d: int
    l: int
    sizes: dict
    bound_a: int
    bound_b: int
    bound_c: int
    iterated_bound: int | None = None
    expected_bound: float | None = None

    def as_json(self) -> dict:
        out = asdict(self)
        out["sizes"] = {str(k): v for k, v in sorted(self.sizes.items())}
        return out


def _size_counts(sizes) -> Counter:
    if isinstance(sizes, Mapping):
        counts = Counter({int(k): int(v) for k, v in sizes.items() if v})
    else:
        counts = Counter(int(k) for k in sizes)
    if any(k not in (1, 2, 3) for k in counts):
        raise ValueError("gate sizes must be 1, 2 or 3")
    return counts


def stuck_at_staircase(n: int, sizes) -> int:
    """floor(log2(n + sum k_i)) + 2."""
    total = n + sum(k * v for k, v in _size_counts(sizes).items())
    return total.bit_length() - 1 + 2


def cell_iterated_bound(sizes) -> int:
    """Number of greedy steps when each step is credited only with the
    guaranteed l - floor(sum 2^-k(f)) new requirements.

    The covered set is taken to be the one maximising that sum (requirements
    of the smallest gates first), so the count is an upper bound for mixed
    gate sizes too.
    """
    counts = _size_counts(sizes)
    l = sum(counts.values())
    if not l:
        return 0
    # blocks of requirements in order of decreasing weight 2^(3-k) (units of 1/8)
    blocks = [(counts[k] << k, 1 << (3 - k)) for k in (1, 2, 3) if counts[k]]
    total = sum(cnt for cnt, _ in blocks)

    def heaviest(cov: int) -> int:
        s8, left = 0, cov
        for cnt, w in blocks:
            take = min(left, cnt)
            s8 += take * w
            left -= take
        return s8

    covered, steps = 0, 0
    while covered < total:
        gain = l - heaviest(covered) // 8
        covered += min(gain, total - covered)
        steps += 1
    return steps


def cell_expected_bound(l: int, k: int) -> float:
    """Closed-form estimate assuming covered counts are uniform mod 2^k."""
    if l <= 0:
        return 0.0
    return math.log2((2 ** (k + 1) / (2 ** k - 1)) * l + 1) / (k - math.log2(2 ** k - 1))


def bounds(c: Circuit | None = None, model: str = "sa", *, n: int | None = None,
           d: int | None = None, sizes=None) -> BoundReport:
    """Upper bounds on the minimal test set size.

    Pass a circuit, or ``n``, ``sizes`` (sequence or {size: count}) and
    optionally ``d`` (defaults to the gate count, its maximum).
    """
    if c is not None:
        n, d, counts = c.n, c.depth, _size_counts(c.sizes)
    else:
        if n is None or sizes is None:
            raise ValueError("need a circuit or both n and sizes")
        counts = _size_counts(sizes)
        d = sum(counts.values()) if d is None else d
    if n < 1 or d < 0:
        raise ValueError("parameters must be positive")
    l = sum(counts.values())
    if model == "sa":
        return BoundReport("sa", n, d, l, dict(counts), (1 << (n - 1)) + 1, d + 2,
                           stuck_at_staircase(n, counts))
    if model != "cell":
        raise ValueError(f"unknown fault model {model!r}")
    if not l:
        return BoundReport("cell", n, d, 0, {}, 1, 1, 1, 1, 1.0)
    k1 = max(counts)
    sum_2k = sum(v << k for k, v in counts.items())
    # sum over i of ceil(2^k_i / i) with sizes sorted in decreasing order
    bound_c, i = 0, 0
    for k in sorted(counts, reverse=True):
        lo, hi = i + 1, i + counts[k]
        p = 1 << k
        # ceil(p/i) = 1 for i >= p; sum the head explicitly
        head_hi = min(hi, p - 1)
        for j in range(lo, head_hi + 1):
            bound_c += -(-p // j)
        bound_c += max(0, hi - max(lo, p) + 1)
        i = hi
    return BoundReport("cell", n, d, l, dict(counts),
                       (1 << n) - (1 << (n - k1)) + 1,
                       sum_2k - l + 1,
                       bound_c,
                       cell_iterated_bound(counts),
                       cell_expected_bound(l, k1))


def staircase(n: int, sizes, model: str = "sa") -> int:
    if model == "sa":
        return stuck_at_staircase(n, sizes)
    return cell_iterated_bound(sizes)


def generate(c: Circuit, strategy: str, model: str = "sa", seed: int = 0) -> TestSet:
    """Dispatch by strategy name (``enum``, ``invcomp``, ``greedy``, ``linear``,
    ``cellback``); the result is checked before it is returned."""
    if strategy == "greedy":
        out = gen_greedy(c, model, seed=seed)
    else:
        fn = {"enum": gen_enumerative, "invcomp": gen_inverse_complement,
              "linear": gen_linear, "cellback": gen_cell_backsolve}.get(strategy)
        if fn is None:
            raise ValueError(f"unknown strategy {strategy!r}")
        out = fn(c)
    res = check(c, out, model)
    if not res.complete:
        raise CircuitError(f"strategy {strategy!r} is not complete for model {model!r}")
    return out
