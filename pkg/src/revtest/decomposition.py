"""Test generation by splitting a circuit into narrow sub-circuits.

The circuit is cut into contiguous gate ranges acting on at most ``m`` wires.
Each range gets its own cover problem over the 2^|support| patterns at its
input.  Vectors created by earlier ranges are partially specified; they join
as zero-cost "claim" columns, one per completion of their don't-care bits,
and each must take exactly one completion.  After the last range the
remaining don't cares are zero-filled and the set is mapped back through the
inverse of the whole circuit.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, CircuitError, Gate, simulate_inverse, wire_bit
from .completeness import TestSet, build_matrix, check
from .cover import CoverProblem, InfeasibleError, _pack, solve_exact

DEFAULT_NODE_LIMIT = 2000


@dataclass(frozen=True)
class PartialVector:
    """n-bit vector with don't cares: bits outside ``care`` are X."""

    width: int
    care: int
    value: int

    def __post_init__(self):
        if self.value & ~self.care:
            raise ValueError("value bits set outside the care mask")

    @classmethod
    def parse(cls, text: str) -> "PartialVector":
        care = value = 0
        for ch in text:
            care, value = care << 1, value << 1
            if ch in "01":
                care |= 1
                value |= int(ch)
            elif ch not in "Xx":
                raise ValueError(f"bad partial vector {text!r}")
        return cls(len(text), care, value)

    def __str__(self):
        out = []
        for w in range(self.width):
            bit = 1 << (self.width - 1 - w)
            out.append(("1" if self.value & bit else "0") if self.care & bit else "X")
        return "".join(out)

    @property
    def n_completions(self) -> int:
        return 1 << (self.width - self.care.bit_count())

    def compatible(self, other: "PartialVector", ignore: int = 0) -> bool:
        return not (self.value ^ other.value) & self.care & other.care & ~ignore

    def fill(self, mask: int, bits: int) -> "PartialVector":
        """Set the don't cares inside ``mask`` from ``bits``."""
        free = mask & ~self.care
        return PartialVector(self.width, self.care | free, self.value | (bits & free))


@dataclass(frozen=True)
class SubCircuit:
    start: int
    stop: int
    support: tuple[int, ...]

    def local(self, c: Circuit) -> Circuit:
        pos = {w: i for i, w in enumerate(self.support)}
        gates = [Gate(tuple(pos[x] for x in g.controls), pos[g.target])
                 for g in c.gates[self.start:self.stop]]
        return Circuit(len(self.support), tuple(gates), tuple(c.names[w] for w in self.support))


def partition(c: Circuit, m: int) -> list[SubCircuit]:
    """Greedy left-to-right cut: a gate joins the current range while the
    union of supports stays within ``m`` wires."""
    biggest = max(c.sizes, default=1)
    if m < biggest:
        raise CircuitError(f"m={m} is smaller than a gate of size {biggest}")
    if m > min(c.n, 16):
        raise CircuitError(f"m must be <= min(n, 16) = {min(c.n, 16)}, got {m}")
    parts, start, wires = [], 0, set()
    for i, g in enumerate(c.gates):
        merged = wires | set(g.wires)
        if len(merged) > m:
            parts.append(SubCircuit(start, i, tuple(sorted(wires))))
            start, merged = i, set(g.wires)
        wires = merged
    if len(c.gates) > start:
        parts.append(SubCircuit(start, len(c.gates), tuple(sorted(wires))))
    return parts


def _gather(x: int, support, n: int) -> int:
    out = 0
    for w in support:
        out = (out << 1) | ((x >> (n - 1 - w)) & 1)
    return out


def _scatter(p: int, support, n: int) -> int:
    s, out = len(support), 0
    for k, w in enumerate(support):
        if (p >> (s - 1 - k)) & 1:
            out |= wire_bit(w, n)
    return out


def _completions(care: int, value: int, s: int):
    free = ~care & ((1 << s) - 1)
    sub = free
    while True:
        yield value | sub
        if not sub:
            return
        sub = (sub - 1) & free


@dataclass
class StepInfo:
    index: int
    start: int
    stop: int
    support: tuple[int, ...]
    claimants: int
    new_vectors: int
    rows: int
    optimal: bool
    nodes: int
    before: list[str] = field(default_factory=list)
    after: list[str] = field(default_factory=list)


@dataclass
class DecompositionResult:
    test_set: TestSet
    steps: list[StepInfo]
    seeds: int


def _step(c: Circuit, sub: SubCircuit, model: str, vectors: list[PartialVector],
          node_limit: int | None):
    n, S, s = c.n, sub.support, len(sub.support)
    smask = _scatter((1 << s) - 1, S, n)
    local = sub.local(c)
    inc = build_matrix(local, model).incidence
    if inc.shape[0]:
        inc = np.unique(inc, axis=0)
    n_rows = inc.shape[0]
    prow = [_pack(inc[:, p]) for p in range(1 << s)]

    columns, costs, labels = list(prow), [1] * (1 << s), list(range(1 << s))
    claim_cols: list[dict[int, int]] = []
    for vi, v in enumerate(vectors):
        care, val = _gather(v.care, S, n), _gather(v.value, S, n)
        cols = {}
        for p in _completions(care, val, s):
            cols[p] = len(columns)
            columns.append(prow[p] | (1 << (n_rows + vi)))
            costs.append(0)
            labels.append(((vi + 1) << s) | p)
        claim_cols.append(cols)
    own = [tuple(cols.values()) for cols in claim_cols]
    # two claimants that could still merge must not share a completion
    shared = []
    for a in range(len(vectors)):
        for b in range(a + 1, len(vectors)):
            if vectors[a].compatible(vectors[b], ignore=smask):
                for p in claim_cols[a].keys() & claim_cols[b].keys():
                    shared.append((claim_cols[a][p], claim_cols[b][p]))
    total_rows = n_rows + len(vectors)
    try:
        sol = solve_exact(CoverProblem(total_rows, tuple(columns), tuple(costs), tuple(labels),
                                       tuple(own) + tuple(shared)), node_limit=node_limit)
    except InfeasibleError:
        if not shared:
            raise
        sol = solve_exact(CoverProblem(total_rows, tuple(columns), tuple(costs), tuple(labels),
                                       tuple(own)), node_limit=node_limit)

    assigned: dict[int, int] = {}
    fresh = []
    for lab in sol.labels:
        vi, p = (lab >> s) - 1, lab & ((1 << s) - 1)
        if vi < 0:
            fresh.append(p)
        else:
            assigned[vi] = p
    used = set(assigned.values())
    out = [v.fill(smask, _scatter(assigned[vi], S, n)) for vi, v in enumerate(vectors)]
    new = [PartialVector(n, smask, _scatter(p, S, n)) for p in fresh if p not in used]
    return out + new, len(new), n_rows, sol


def _apply(c: Circuit, sub: SubCircuit, v: PartialVector) -> PartialVector:
    smask = _scatter((1 << len(sub.support)) - 1, sub.support, c.n)
    v = v.fill(smask, 0)
    x = v.value
    for g in c.gates[sub.start:sub.stop]:
        x = g.apply(x, c.n)
    return PartialVector(c.n, v.care, x)


def decompose(c: Circuit, m: int, model: str = "sa", node_limit: int | None = DEFAULT_NODE_LIMIT,
              record: bool = False) -> DecompositionResult:
    if model not in ("sa", "cell"):
        raise ValueError(f"unknown fault model {model!r}")
    parts = partition(c, m)
    vectors: list[PartialVector] = []
    steps: list[StepInfo] = []
    seeds = 0
    for i, sub in enumerate(parts):
        claimants = len(vectors)
        vectors, n_new, n_rows, sol = _step(c, sub, model, vectors, node_limit)
        if i == 0:
            seeds = n_new
        info = StepInfo(i, sub.start, sub.stop, sub.support, claimants, n_new, n_rows,
                        sol.optimal, sol.nodes)
        if record:
            info.before = [str(v) for v in vectors]
        vectors = [_apply(c, sub, v) for v in vectors]
        if record:
            info.after = [str(v) for v in vectors]
        steps.append(info)

    touched = 0
    for sub in parts:
        touched |= _scatter((1 << len(sub.support)) - 1, sub.support, c.n)
    idle = c.full_mask & ~touched
    if model == "sa" and idle:
        while len(vectors) < 2:
            vectors.append(PartialVector(c.n, 0, 0))
        # idle wires pass straight through: alternate them so each sees 0 and 1
        vectors = [v.fill(idle, idle if k % 2 else 0) for k, v in enumerate(vectors)]
    finals = [v.fill(c.full_mask, 0).value for v in vectors]
    inputs = [simulate_inverse(c, x) for x in finals]
    return DecompositionResult(TestSet.dedup(c.n, inputs), steps, seeds)


def run(c: Circuit, m: int, model: str = "sa", node_limit: int | None = DEFAULT_NODE_LIMIT) -> TestSet:
    """Decomposition test set; always complete for ``model``."""
    res = decompose(c, m, model, node_limit)
    assert check(c, res.test_set, model).complete
    return res.test_set


def format_table(vectors, names) -> str:
    """Partial vectors laid out one per row under their wire names."""
    width = max((len(x) for x in names), default=1)
    head = " ".join(f"{x:>{width}}" for x in names)
    lines = [head, "-" * len(head)]
    for v in vectors:
        lines.append(" ".join(f"{ch:>{width}}" for ch in str(v)))
    return "\n".join(lines)
