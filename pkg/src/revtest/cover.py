"""Exact minimum-cost set cover by branch and bound.

Rows are constraints that must each be covered by at least one selected
column; columns have cost 0 or 1.  Optional ``groups`` list column sets of
which at most one may be selected (used by the decomposition generator to give
each partially specified vector exactly one completion).

Bitsets are plain Python ints: ``col_rows[c]`` has bit r set when column c
covers row r, ``row_cols[r]`` is the transpose.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, CircuitError
from .completeness import CoverageMatrix, TestSet, build_matrix, check

MAX_COLUMNS = 1 << 16
_DOMINANCE_COLS = 8192
_DOMINANCE_ROWS = 2500


class InfeasibleError(ValueError):
    def __init__(self, rows):
        super().__init__(f"rows cannot be covered: {list(rows)[:10]}")
        self.rows = tuple(rows)


class IncompleteTestSetError(ValueError):
    def __init__(self, result):
        super().__init__(f"test set is not complete; {len(result.uncovered)} uncovered")
        self.result = result


@dataclass(frozen=True)
class CoverProblem:
    n_rows: int
    columns: tuple[int, ...]
    costs: tuple[int, ...]
    labels: tuple = ()
    groups: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if len(self.costs) != len(self.columns):
            raise ValueError("one cost per column required")
        if any(c not in (0, 1) for c in self.costs):
            raise ValueError("costs must be 0 or 1")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(self.columns))))
        if len(self.columns) > MAX_COLUMNS:
            raise ValueError(f"at most {MAX_COLUMNS} columns supported")

    @classmethod
    def from_matrix(cls, m: CoverageMatrix) -> "CoverProblem":
        return cls.from_incidence(m.incidence, labels=m.columns)

    @classmethod
    def from_incidence(cls, inc: np.ndarray, costs=None, labels=()) -> "CoverProblem":
        """Build from a boolean (rows x columns) array; identical rows merged."""
        inc = np.asarray(inc, dtype=bool)
        n_cols = inc.shape[1]
        if inc.shape[0]:
            inc = np.unique(inc, axis=0)
        columns = tuple(_pack(inc[:, c]) for c in range(n_cols))
        costs = tuple(costs) if costs is not None else (1,) * n_cols
        return cls(inc.shape[0], columns, costs, tuple(labels))


def _pack(col: np.ndarray) -> int:
    return int.from_bytes(np.packbits(col, bitorder="little").tobytes(), "little")


def _bits(x: int) -> list[int]:
    """Indices of set bits, ascending."""
    return [i for i, ch in enumerate(bin(x)[:1:-1]) if ch == "1"]


@dataclass(frozen=True)
class Solution:
    selected: tuple[int, ...]
    objective: int
    optimal: bool
    nodes: int
    lower_bound: int
    labels: tuple = field(default=())


class _Budget(Exception):
    pass


def solve_exact(p: CoverProblem, node_limit: int | None = None,
                time_limit: float | None = None) -> Solution:
    """Minimum-cost cover.

    With a budget, returns the best cover found and ``optimal=False`` if the
    search was cut short.  Only ``node_limit`` keeps results deterministic.
    """
    full = (1 << p.n_rows) - 1
    union = 0
    for m in p.columns:
        union |= m
    if union != full:
        raise InfeasibleError(_bits(full & ~union))
    return _Search(p, node_limit, time_limit).run()


class _Search:
    def __init__(self, p: CoverProblem, node_limit, time_limit):
        self.p = p
        self.node_limit = node_limit
        self.deadline = None if time_limit is None else time.monotonic() + time_limit
        self.nodes = 0

    # -- preprocessing --------------------------------------------------------
    def _reduce(self):
        p = self.p
        n_cols = len(p.columns)
        grouped = [False] * n_cols
        conflict = [0] * n_cols
        for grp in p.groups:
            gm = 0
            for c in grp:
                gm |= 1 << c
            for c in grp:
                grouped[c] = True
                conflict[c] |= gm & ~(1 << c)
        keep = [c for c in range(n_cols) if p.columns[c]]
        # identical ungrouped columns: keep the cheapest, first in order
        seen: dict[int, int] = {}
        alive = []
        for c in sorted(keep, key=lambda c: (p.costs[c], c)):
            if grouped[c]:
                alive.append(c)
                continue
            if p.columns[c] in seen:
                continue
            seen[p.columns[c]] = c
            alive.append(c)
        # subset dominance by an ungrouped column of no greater cost
        if len(alive) <= _DOMINANCE_COLS:
            free = [c for c in alive if not grouped[c]]
            # covers[r]: free columns (as a bitset over ``free``) containing row r
            covers = [0] * p.n_rows
            for i, c in enumerate(free):
                for r in _bits(p.columns[c]):
                    covers[r] |= 1 << i
            fpos = {c: i for i, c in enumerate(free)}
            kept = []
            for c in alive:
                mc = p.columns[c]
                sup = (1 << len(free)) - 1
                for r in _bits(mc):
                    sup &= covers[r]
                    if not sup:
                        break
                if c in fpos:
                    sup &= ~(1 << fpos[c])
                dominated = any(
                    p.costs[free[i]] <= p.costs[c]
                    and (p.columns[free[i]] != mc or p.costs[free[i]] < p.costs[c])
                    for i in _bits(sup))
                if not dominated:
                    kept.append(c)
            alive = kept
        alive.sort()
        self.cols = alive
        self.cpos = {c: i for i, c in enumerate(alive)}
        # rows as column masks over local column indices
        row_cols = [0] * p.n_rows
        for i, c in enumerate(alive):
            for r in _bits(p.columns[c]):
                row_cols[r] |= 1 << i
        uniq: dict[int, None] = {}
        for rc in row_cols:
            uniq.setdefault(rc, None)
        rows = sorted(uniq, key=lambda m: (m.bit_count(), m))
        if len(rows) <= _DOMINANCE_ROWS:
            kept_rows: list[int] = []
            for rc in rows:
                if not any(k & rc == k for k in kept_rows):
                    kept_rows.append(rc)
            rows = kept_rows
        self.row_cols = rows
        col_rows = [0] * len(alive)
        for r, rc in enumerate(rows):
            for i in _bits(rc):
                col_rows[i] |= 1 << r
        self.col_rows = col_rows
        self.cost = [p.costs[c] for c in alive]
        self.zero = sum(1 << i for i, c in enumerate(alive) if p.costs[c] == 0)
        self.conflict = []
        for c in alive:
            m = 0
            for o in _bits(conflict[c]):
                if o in self.cpos:
                    m |= 1 << self.cpos[o]
            self.conflict.append(m)
        self.label = [p.labels[c] for c in alive]

    def _key(self, i: int, uncovered: int):
        lab = self.label[i]
        try:
            order = (0, int(lab))
        except (TypeError, ValueError):
            order = (1, str(lab))
        return (self.cost[i], -(self.col_rows[i] & uncovered).bit_count(), order, i)

    # -- bounds ---------------------------------------------------------------
    def _lower_bound(self, uncovered: int, avail: int) -> int:
        zero = self.zero & avail
        used = 0
        lb = 0
        rc = self.row_cols
        for r in _bits(uncovered):
            cols = rc[r] & avail
            if cols & zero:
                continue
            if not cols & used:
                lb += 1
                used |= cols
        if not zero and lb:
            need = uncovered.bit_count()
            best = max(((self.col_rows[i] & uncovered).bit_count() for i in _bits(avail)),
                       default=0)
            if best:
                lb = max(lb, -(-need // best))
        return lb

    # -- heuristics -----------------------------------------------------------
    def _greedy(self, uncovered: int, avail: int):
        covered = self.all_rows & ~uncovered
        chosen = []
        while uncovered:
            best, best_key = None, None
            for i in _bits(avail):
                gain = (self.col_rows[i] & uncovered).bit_count()
                if not gain:
                    continue
                key = (self.cost[i] == 0, gain)
                if best_key is None or key > best_key:
                    best, best_key = i, key
            if best is None:
                return None
            chosen.append(best)
            uncovered &= ~self.col_rows[best]
            avail &= ~(1 << best) & ~self.conflict[best]
        return self._prune(chosen, covered)

    def _prune(self, chosen, covered):
        chosen = list(chosen)
        for i in sorted(chosen, key=lambda i: (-self.cost[i], self.col_rows[i].bit_count())):
            if self.cost[i] == 0:
                continue
            rest = covered
            for o in chosen:
                if o != i:
                    rest |= self.col_rows[o]
            if rest == self.all_rows:
                chosen.remove(i)
        return chosen

    # -- search ---------------------------------------------------------------
    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _Budget
        if self.deadline is not None and not self.nodes & 255 and time.monotonic() > self.deadline:
            raise _Budget

    def _dfs(self, uncovered: int, avail: int, cost: int, chosen: list):
        self._tick()
        if not uncovered:
            if cost < self.best_cost:
                self.best_cost = cost
                self.best = list(chosen)
            return
        if cost + self._lower_bound(uncovered, avail) >= self.best_cost:
            return
        rc = self.row_cols
        row, row_n = -1, None
        for r in _bits(uncovered):
            k = (rc[r] & avail).bit_count()
            if row_n is None or k < row_n:
                row, row_n = r, k
                if k <= 1:
                    break
        if not row_n:
            return
        cands = sorted(_bits(rc[row] & avail), key=lambda i: self._key(i, uncovered))
        for i in cands:
            if cost + self.cost[i] >= self.best_cost:
                continue
            chosen.append(i)
            self._dfs(uncovered & ~self.col_rows[i], avail & ~(1 << i) & ~self.conflict[i],
                      cost + self.cost[i], chosen)
            chosen.pop()
            avail &= ~(1 << i)

    def run(self) -> Solution:
        self._reduce()
        n_rows = len(self.row_cols)
        self.all_rows = (1 << n_rows) - 1
        uncovered = self.all_rows
        avail = (1 << len(self.cols)) - 1
        # columns that alone cover some row
        forced, base_cost = [], 0
        changed = True
        while changed:
            changed = False
            for r in _bits(uncovered):
                cols = self.row_cols[r] & avail
                if cols.bit_count() == 1:
                    i = cols.bit_length() - 1
                    forced.append(i)
                    base_cost += self.cost[i]
                    uncovered &= ~self.col_rows[i]
                    avail &= ~(1 << i) & ~self.conflict[i]
                    changed = True
                    break
                if not cols:
                    raise InfeasibleError([r])
        root_lb = base_cost + self._lower_bound(uncovered, avail) if uncovered else base_cost
        self.best, self.best_cost = None, float("inf")
        g = self._greedy(uncovered, avail)
        if g is not None:
            self.best = g
            self.best_cost = sum(self.cost[i] for i in g)
        optimal = True
        if self.best is None or self.best_cost > root_lb - base_cost:
            try:
                self._dfs(uncovered, avail, 0, [])
            except _Budget:
                optimal = False
        if self.best is None:
            if optimal:
                raise InfeasibleError([])
            raise _BudgetExhausted(self.nodes)
        picked = sorted(self.cols[i] for i in forced + self.best)
        objective = sum(self.p.costs[c] for c in picked)
        return Solution(tuple(picked), objective, optimal, self.nodes,
                        objective if optimal else root_lb,
                        tuple(self.p.labels[c] for c in picked))


class _BudgetExhausted(RuntimeError):
    def __init__(self, nodes):
        super().__init__(f"search budget exhausted after {nodes} nodes without a cover")


# --- test-set level wrappers ------------------------------------------------

def min_test_set(c: Circuit, model: str = "sa", node_limit: int | None = None) -> TestSet:
    """Minimum complete test set over all 2^n inputs."""
    return min_test_solution(c, model, node_limit)[0]


def min_test_solution(c: Circuit, model: str = "sa", node_limit: int | None = None):
    if c.n > 16:
        raise CircuitError(f"exact minimum needs n <= 16, got {c.n}")
    if model == "cell" and not c.gates:
        return TestSet(c.n, ()), Solution((), 0, True, 0, 0)
    m = build_matrix(c, model)
    sol = solve_exact(CoverProblem.from_matrix(m), node_limit=node_limit)
    return TestSet(c.n, sol.labels), sol


def compact(c: Circuit, tests, model: str = "sa", node_limit: int | None = None) -> TestSet:
    """Smallest complete subset of an already complete test set."""
    return compact_solution(c, tests, model, node_limit)[0]


def compact_solution(c: Circuit, tests, model: str = "sa", node_limit: int | None = None):
    tests = TestSet.dedup(c.n, tests)
    res = check(c, tests, model)
    if not res.complete:
        raise IncompleteTestSetError(res)
    if model == "cell" and not c.gates:
        return TestSet(c.n, ()), Solution((), 0, True, 0, 0)
    m = build_matrix(c, model, candidates=tests)
    sol = solve_exact(CoverProblem.from_matrix(m), node_limit=node_limit)
    chosen = set(sol.labels)
    return TestSet(c.n, [t for t in tests if t in chosen]), sol
