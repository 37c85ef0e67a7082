"""Random circuits, the optimal 3-wire catalog and the size/time benchmark."""
from __future__ import annotations

import csv
import itertools
import math
import time
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate
from .completeness import check
from .constructive import gen_greedy, gen_inverse_complement, staircase
from .cover import compact, min_test_set
from . import decomposition

LIBRARIES = ("nct", "cnot")
CSV_FIELDS = ("n", "length", "seed", "strategy", "model", "size_pre", "size_post", "wall_ms", "bound")


@dataclass(frozen=True)
class RngSpec:
    """Philox stream keyed by a 64-bit seed plus optional integer keys."""

    seed: int
    generator: str = "philox"

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")
        if self.generator != "philox":
            raise ValueError(f"unsupported generator {self.generator!r}")

    def stream(self, *keys: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(np.random.SeedSequence([self.seed, *keys])))


@lru_cache(maxsize=None)
def gate_universe(n: int, library: str = "nct") -> tuple[Gate, ...]:
    """Every distinct gate placement; Toffoli controls are unordered."""
    if library not in LIBRARIES:
        raise ValueError(f"unknown library {library!r}")
    if library == "nct" and n < 3:
        raise CircuitError("the NCT library needs n >= 3 for Toffoli gates")
    if library == "cnot" and n < 2:
        raise CircuitError("C-NOT gates need n >= 2")
    gates = []
    if library == "nct":
        gates += [Gate((), t) for t in range(n)]
    gates += [Gate((a,), t) for t in range(n) for a in range(n) if a != t]
    if library == "nct":
        for t in range(n):
            others = [w for w in range(n) if w != t]
            gates += [Gate(pair, t) for pair in itertools.combinations(others, 2)]
    return tuple(gates)


def random_circuit(n: int, length: int, rng: RngSpec | int, library: str = "nct") -> Circuit:
    """``length`` gates drawn uniformly from the gate universe.

    An integer ``rng`` is a seed; the stream is keyed by (n, length) so each
    grid point of a sweep gets independent circuits for the same seed.
    """
    if length < 0:
        raise ValueError("length must be non-negative")
    spec = rng if isinstance(rng, RngSpec) else RngSpec(int(rng))
    universe = gate_universe(n, library)
    picks = spec.stream(n, length).integers(len(universe), size=length)
    return Circuit(n, tuple(universe[int(i)] for i in picks))


# --- optimal 3-wire catalog --------------------------------------------------

_FACT = [math.factorial(i) for i in range(9)]
IDENTITY = tuple(range(8))


def lehmer(perm: Sequence[int]) -> int:
    """Rank of a permutation of 0..7 in lexicographic order."""
    rank, rest = 0, list(range(8))
    for i, x in enumerate(perm):
        j = rest.index(x)
        rank += j * _FACT[7 - i]
        rest.pop(j)
    return rank


def unrank(rank: int) -> tuple[int, ...]:
    rest, out = list(range(8)), []
    for i in range(8):
        j, rank = divmod(rank, _FACT[7 - i])
        out.append(rest.pop(j))
    return tuple(out)


def pack(perm: Sequence[int]) -> int:
    """Permutation image as 8 three-bit cells."""
    return sum(x << (3 * i) for i, x in enumerate(perm))


def unpack(code: int) -> tuple[int, ...]:
    return tuple((code >> (3 * i)) & 7 for i in range(8))


def gate_perm(g: Gate) -> tuple[int, ...]:
    return tuple(g.apply(x, 3) for x in range(8))


def circuit_perm(c: Circuit) -> tuple[int, ...]:
    perm = IDENTITY
    for g in c.gates:
        gp = gate_perm(g)
        perm = tuple(gp[x] for x in perm)
    return perm


@dataclass
class OptimalCatalog:
    """Optimal NCT length and one optimal circuit for every 3-bit permutation,
    indexed by Lehmer rank."""

    codes: np.ndarray    # packed image per rank
    lengths: np.ndarray  # optimal gate count per rank
    parent: np.ndarray   # rank reached one gate earlier (-1 for identity)
    via: np.ndarray      # index into ``gates`` of the last gate
    gates: tuple[Gate, ...]

    def __len__(self):
        return len(self.lengths)

    def histogram(self) -> list[int]:
        return np.bincount(self.lengths).tolist()

    def perm(self, rank: int) -> tuple[int, ...]:
        return unpack(int(self.codes[rank]))

    def circuit(self, rank: int) -> Circuit:
        seq = []
        while self.parent[rank] >= 0:
            seq.append(self.gates[self.via[rank]])
            rank = int(self.parent[rank])
        return Circuit(3, tuple(reversed(seq)))

    def as_json(self) -> dict:
        return {"count": len(self), "histogram": self.histogram(),
                "max_length": int(self.lengths.max())}


def enumerate_optimal_3wire() -> OptimalCatalog:
    """Breadth-first search from the identity over all 8! permutations."""
    gates = gate_universe(3)
    gps = [gate_perm(g) for g in gates]
    total = _FACT[8]
    codes = np.zeros(total, dtype=np.int64)
    lengths = np.full(total, -1, dtype=np.int8)
    parent = np.full(total, -1, dtype=np.int32)
    via = np.full(total, -1, dtype=np.int8)
    start = lehmer(IDENTITY)
    lengths[start], codes[start] = 0, pack(IDENTITY)
    queue = deque([(start, IDENTITY)])
    while queue:
        rank, perm = queue.popleft()
        depth = lengths[rank] + 1
        for gi, gp in enumerate(gps):
            nxt = tuple(gp[x] for x in perm)
            r = lehmer(nxt)
            if lengths[r] < 0:
                lengths[r], parent[r], via[r], codes[r] = depth, rank, gi, pack(nxt)
                queue.append((r, nxt))
    if (lengths < 0).any():
        raise RuntimeError("NCT gates did not reach every 3-bit permutation")
    return OptimalCatalog(codes, lengths, parent, via, gates)


def _compose(a, b):
    """Apply ``a`` then ``b``."""
    return tuple(b[x] for x in a)


def _inverse(p):
    out = [0] * 8
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


@lru_cache(maxsize=1)
def _short_products(max_len: int = 4) -> dict:
    """Minimal length of every permutation expressible by <= max_len gates,
    by enumerating gate sequences directly."""
    gps = [gate_perm(g) for g in gate_universe(3)]
    best = {IDENTITY: 0}
    for k in range(1, max_len + 1):
        for seq in itertools.product(gps, repeat=k):
            p = IDENTITY
            for gp in seq:
                p = _compose(p, gp)
            best.setdefault(p, k)
    return best


def shortest_length(perm: Sequence[int], limit: int = 8) -> int | None:
    """Brute-force minimal NCT length up to ``limit`` (<= 8) by meeting
    sequences of <= 4 gates from both ends; independent of the BFS."""
    short = _short_products(4)
    perm = tuple(perm)
    by_len: dict[int, list] = {}
    for p, k in short.items():
        by_len.setdefault(k, []).append(p)
    for total in range(limit + 1):
        for ka in range(min(total, 4) + 1):
            kb = total - ka
            if kb > 4:
                continue
            for a in by_len.get(ka, ()):
                # perm = a then b  =>  b = a^-1 then perm
                b = _compose(_inverse(a), perm)
                if short.get(b) == kb:
                    return total
    return None


@dataclass
class SizeTable:
    counts: dict          # (test size, length) -> number of circuits
    max_size: int
    histogram: list[int]

    def matrix(self) -> list[list[int]]:
        sizes = range(min(s for s, _ in self.counts), self.max_size + 1)
        width = len(self.histogram)
        return [[self.counts.get((s, l), 0) for l in range(width)] for s in sizes]

    def as_json(self) -> dict:
        lo = min(s for s, _ in self.counts)
        return {"histogram": self.histogram, "max_size": self.max_size,
                "sizes": list(range(lo, self.max_size + 1)), "matrix": self.matrix()}


def size_table(catalog: OptimalCatalog, model: str = "sa") -> SizeTable:
    """Minimal test size of one optimal circuit per permutation, tabulated
    against circuit length."""
    counts: Counter = Counter()
    for rank in range(len(catalog)):
        size = len(min_test_set(catalog.circuit(rank), model))
        counts[(size, int(catalog.lengths[rank]))] += 1
    return SizeTable(dict(counts), max(s for s, _ in counts), catalog.histogram())


def _wire_class(perm, w: int) -> int:
    """Wire ``w`` as a Boolean function of the input, up to complement."""
    f = sum(((perm[x] >> (2 - w)) & 1) << x for x in range(8))
    return min(f, f ^ 0xFF)


def five_vector_circuit() -> Circuit:
    """A (non-optimal) 3-wire NCT circuit whose minimal stuck-at test set has
    five vectors.

    Four inputs fail exactly when they form the 0-set or 1-set of some wire at
    some level, so the walk below keeps adding gates until the wire values
    across all levels have taken every one of the 35 balanced functions (up to
    complement).  Each extension is a shortest gate sequence, found by BFS over
    permutations, that produces a class not yet seen.
    """
    gates = gate_universe(3)
    gps = [gate_perm(g) for g in gates]
    perm = IDENTITY
    seen = {_wire_class(perm, w) for w in range(3)}
    seq: list[Gate] = []
    while len(seen) < 35:
        prev = {perm: None}
        queue = deque([perm])
        found = None
        while queue and found is None:
            p = queue.popleft()
            for gi, gp in enumerate(gps):
                q = _compose(p, gp)
                if q in prev:
                    continue
                prev[q] = (p, gi)
                if _wire_class(q, gates[gi].target) not in seen:
                    found = q
                    break
                queue.append(q)
        path = []
        q = found
        while prev[q] is not None:
            p, gi = prev[q]
            path.append(gi)
            q = p
        for gi in reversed(path):
            perm = _compose(perm, gps[gi])
            seen.add(_wire_class(perm, gates[gi].target))
            seq.append(gates[gi])
    return Circuit(3, tuple(seq))


# --- benchmark harness -------------------------------------------------------

STRATEGIES = ("decomp", "greedy", "invcomp", "exact")


@dataclass(frozen=True)
class BenchConfig:
    ns: tuple[int, ...]
    lengths: tuple[int, ...]
    circuits: int = 20
    m: int = 8
    model: str = "sa"
    strategy: str = "decomp"
    seed: int = 0
    compact: bool = True
    node_limit: int | None = decomposition.DEFAULT_NODE_LIMIT

    def __post_init__(self):
        if not self.ns or not self.lengths:
            raise ValueError("need at least one n and one length")
        if any(n < 3 for n in self.ns):
            raise ValueError("benchmark circuits need n >= 3")
        if any(l < 0 for l in self.lengths):
            raise ValueError("lengths must be non-negative")
        if self.circuits < 1:
            raise ValueError("circuits per point must be >= 1")
        if self.model not in ("sa", "cell"):
            raise ValueError(f"unknown fault model {self.model!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "decomp" and not 3 <= self.m <= min(min(self.ns), 16):
            raise ValueError("m must lie in 3 .. min(n, 16)")


@dataclass(frozen=True)
class BenchRecord:
    n: int
    length: int
    seed: int
    strategy: str
    model: str
    size_pre: int
    size_post: int
    wall_ms: float
    bound: int

    def row(self) -> dict:
        return asdict(self)


def _generate(c: Circuit, cfg: BenchConfig, seed: int):
    if cfg.strategy == "decomp":
        return decomposition.decompose(c, min(cfg.m, c.n), cfg.model, cfg.node_limit).test_set
    if cfg.strategy == "greedy":
        return gen_greedy(c, cfg.model, seed=seed)
    if cfg.strategy == "invcomp":
        if cfg.model != "sa":
            raise ValueError("invcomp is a stuck-at construction")
        return gen_inverse_complement(c)
    return min_test_set(c, cfg.model, node_limit=cfg.node_limit)


def run_point(cfg: BenchConfig, n: int, length: int) -> list[BenchRecord]:
    out = []
    for i in range(cfg.circuits):
        seed = cfg.seed + i
        c = random_circuit(n, length, seed)
        t0 = time.perf_counter()
        tests = _generate(c, cfg, seed)
        post = compact(c, tests, cfg.model, node_limit=cfg.node_limit) if cfg.compact else tests
        wall = (time.perf_counter() - t0) * 1000.0
        if not check(c, post, cfg.model).complete:
            raise AssertionError(f"incomplete test set for n={n} length={length} seed={seed}")
        out.append(BenchRecord(n, length, seed, cfg.strategy, cfg.model, len(tests), len(post),
                               round(wall, 3), staircase(n, c.sizes, cfg.model)))
    return out


def bench(cfg: BenchConfig, workers: int = 1) -> list[BenchRecord]:
    """Records in (n, length, seed) order regardless of ``workers``."""
    points = [(n, l) for n in cfg.ns for l in cfg.lengths]
    if workers <= 1:
        chunks = [run_point(cfg, n, l) for n, l in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run_point, [cfg] * len(points),
                                   [n for n, _ in points], [l for _, l in points]))
    return [r for chunk in chunks for r in chunk]


def write_csv(records: Iterable[BenchRecord], fh) -> None:
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())


@dataclass
class PointSummary:
    n: int
    length: int
    circuits: int
    mean_pre: float
    mean_post: float
    mean_ms: float
    bound: float
    sizes: list = field(default_factory=list)


def summarize(records: Sequence[BenchRecord]) -> list[PointSummary]:
    groups: dict = {}
    for r in records:
        groups.setdefault((r.n, r.length), []).append(r)
    out = []
    for (n, l), rs in groups.items():
        out.append(PointSummary(n, l, len(rs),
                                float(np.mean([r.size_pre for r in rs])),
                                float(np.mean([r.size_post for r in rs])),
                                float(np.mean([r.wall_ms for r in rs])),
                                float(np.mean([r.bound for r in rs])),
                                [r.size_post for r in rs]))
    return out
