"""Test-set completeness checks and the coverage matrix fed to the solver."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .circuit import BitVector, Circuit, CircuitError, _value, to_str
from .faults import (CellFault, FaultUniverse, LevelSite, StuckAtFault, detection_matrix,
                     enumerate_faults, gate_patterns)

MAX_ENUM_WIRES = 20


class TestSet(tuple):
    """Ordered, duplicate-free input vectors for an ``width``-wire circuit."""

    __test__ = False  # not a pytest class

    def __new__(cls, width: int, vectors: Iterable = ()):
        vals = [_value(v, width)[0] for v in vectors]
        if len(set(vals)) != len(vals):
            raise CircuitError("test set contains duplicate vectors")
        self = super().__new__(cls, vals)
        self.width = width
        return self

    @classmethod
    def dedup(cls, width: int, vectors: Iterable) -> "TestSet":
        seen: dict[int, None] = {}
        for v in vectors:
            seen.setdefault(_value(v, width)[0], None)
        return cls(width, seen)

    @classmethod
    def parse(cls, width: int, text: str) -> "TestSet":
        items = [s for s in (p.strip() for p in text.replace(";", ",").split(",")) if s]
        return cls(width, [BitVector.parse(s) for s in items])

    def strings(self) -> list[str]:
        return [to_str(v, self.width) for v in self]

    def __repr__(self):
        return f"TestSet({self.width}, {self.strings()})"


@dataclass(frozen=True)
class CheckResult:
    complete: bool
    model: str
    uncovered: tuple

    def __bool__(self):
        return self.complete

    def as_json(self) -> dict:
        if self.model == "sa":
            unc = [{"level": j, "wire": w, "value": v} for j, w, v in self.uncovered]
        else:
            unc = [{"gate": g, "pattern": p} for g, p in self.uncovered]
        return {"complete": self.complete, "model": self.model, "uncovered": unc}


def _vals(c: Circuit, tests) -> np.ndarray:
    return np.array([_value(t, c.n)[0] for t in tests], dtype=np.uint64)


def is_complete_stuck_at(c: Circuit, tests) -> CheckResult:
    """Every wire at every level must be driven to both 0 and 1."""
    vals = _vals(c, tests)
    cm, tm, b = c.program
    ones, zeros = kernels.impl.coverage(vals, cm, tm, b, np.uint64(c.full_mask))
    full = c.full_mask
    missing = []
    for j in range(c.depth + 1):
        o, z = int(ones[j]), int(zeros[j])
        if o == full and z == full:
            continue
        for w in range(c.n):
            bit = 1 << (c.n - 1 - w)
            if not z & bit:
                missing.append((j, w, 0))
            if not o & bit:
                missing.append((j, w, 1))
    return CheckResult(not missing, "sa", tuple(missing))


def is_complete_cell(c: Circuit, tests) -> CheckResult:
    """Every gate must see all 2^k input patterns."""
    vals = _vals(c, tests)
    pats = gate_patterns(c, vals)
    missing = []
    for g, gate in enumerate(c.gates):
        seen = set(pats[:, g].tolist())
        missing.extend((g, a) for a in range(1 << gate.size) if a not in seen)
    return CheckResult(not missing, "cell", tuple(missing))


def check(c: Circuit, tests, model: str = "sa") -> CheckResult:
    if model == "sa":
        return is_complete_stuck_at(c, tests)
    if model == "cell":
        return is_complete_cell(c, tests)
    raise ValueError(f"unknown fault model {model!r}")


@dataclass(frozen=True)
class CoverageMatrix:
    """Rows are faults (or cell requirements), columns candidate vectors.

    Stuck-at rows come in two blocks like the ILP: first "wire is 1" rows
    (stuck-at-0 detection) for every (level, wire), then "wire is 0" rows.
    """

    model: str
    rows: tuple
    columns: tuple[int, ...]
    incidence: np.ndarray

    @property
    def shape(self):
        return self.incidence.shape

    def row_label(self, r: int) -> tuple:
        f = self.rows[r]
        if isinstance(f, CellFault):
            return (f.gate, f.pattern)
        return (f.site.level, f.site.wire, 1 - f.polarity)


def _matrix_rows(c: Circuit, model: str) -> tuple:
    if model == "cell":
        return enumerate_faults(c, "cell").faults
    if model != "sa":
        raise ValueError(f"unknown fault model {model!r}")
    sites = [LevelSite(j, w) for j in range(c.depth + 1) for w in range(c.n)]
    return tuple(StuckAtFault(s, 0) for s in sites) + tuple(StuckAtFault(s, 1) for s in sites)


def build_matrix(c: Circuit, model: str = "sa", candidates: Sequence | None = None) -> CoverageMatrix:
    if candidates is None:
        if c.n > MAX_ENUM_WIRES:
            raise CircuitError(f"full candidate space needs n <= {MAX_ENUM_WIRES}, got {c.n}")
        cols = np.arange(1 << c.n, dtype=np.uint64)
    else:
        cols = _vals(c, candidates)
    rows = _matrix_rows(c, model)
    inc = detection_matrix(c, cols, FaultUniverse(model, "level" if model == "sa" else None, rows))
    return CoverageMatrix(model, rows, tuple(int(v) for v in cols), inc)
