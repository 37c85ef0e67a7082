"""Stuck-at and cell fault models.

Two stuck-at site conventions are supported.  ``"level"`` puts a site on every
wire at every level (n(d+1) sites, the ILP's rows).  ``"pin"`` puts a site on
every gate input pin and every circuit output (n + sum k_i sites).  Every pin
carries the value of some level site, so the two conventions agree on
completeness.  A cell fault is a detection requirement: gate ``g`` must see
input pattern ``a`` (bits in pin order, first pin is the MSB).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .circuit import Circuit, CircuitError, _value, level_states, simulate, trace, wire_bit

MODELS = ("sa", "cell")
CONVENTIONS = ("level", "pin")


@dataclass(frozen=True, order=True)
class LevelSite:
    level: int
    wire: int

    def __str__(self):
        return f"L{self.level}.w{self.wire}"


@dataclass(frozen=True, order=True)
class PinSite:
    gate: int
    pin: int

    def __str__(self):
        return f"g{self.gate}.p{self.pin}"


@dataclass(frozen=True, order=True)
class OutputPin:
    wire: int

    def __str__(self):
        return f"out.w{self.wire}"


Site = Union[LevelSite, PinSite, OutputPin]


@dataclass(frozen=True)
class StuckAtFault:
    site: Site
    polarity: int

    def __str__(self):
        return f"SA{self.polarity}@{self.site}"


@dataclass(frozen=True, order=True)
class CellFault:
    """Requirement that gate ``gate`` receives input ``pattern``."""

    gate: int
    pattern: int
    size: int

    def __str__(self):
        return f"CELL@g{self.gate}:{self.pattern:0{self.size}b}"


Fault = Union[StuckAtFault, CellFault]


@dataclass(frozen=True)
class MultipleFault:
    faults: tuple[StuckAtFault, ...]

    def __post_init__(self):
        faults = tuple(self.faults)
        if not faults:
            raise ValueError("a multiple fault needs at least one fault")
        if len({f.site for f in faults}) != len(faults):
            raise ValueError("multiple fault sites must be distinct")
        object.__setattr__(self, "faults", faults)


@dataclass(frozen=True)
class FaultUniverse:
    model: str
    convention: str | None
    faults: tuple[Fault, ...]

    def __len__(self):
        return len(self.faults)

    def __iter__(self):
        return iter(self.faults)

    def report(self) -> str:
        return "".join(f"{f}\n" for f in self.faults)


def level_sites(c: Circuit) -> list[LevelSite]:
    return [LevelSite(j, w) for j in range(c.depth + 1) for w in range(c.n)]


def pin_sites(c: Circuit) -> list[Site]:
    sites: list[Site] = [PinSite(g, p) for g, gate in enumerate(c.gates) for p in range(gate.size)]
    sites += [OutputPin(w) for w in range(c.n)]
    return sites


def enumerate_faults(c: Circuit, model: str = "sa", convention: str = "level") -> FaultUniverse:
    if model == "cell":
        faults = [CellFault(g, a, gate.size)
                  for g, gate in enumerate(c.gates) for a in range(1 << gate.size)]
        return FaultUniverse("cell", None, tuple(faults))
    if model != "sa":
        raise ValueError(f"unknown fault model {model!r}")
    if convention == "level":
        sites: list[Site] = level_sites(c)
    elif convention == "pin":
        sites = pin_sites(c)
    else:
        raise ValueError(f"unknown site convention {convention!r}")
    return FaultUniverse("sa", convention,
                         tuple(StuckAtFault(s, p) for s in sites for p in (0, 1)))


def fault_count(c: Circuit, model: str = "sa", convention: str = "level") -> int:
    if model == "cell":
        return sum(1 << k for k in c.sizes)
    if convention == "pin":
        return 2 * (c.n + sum(c.sizes))
    return 2 * c.n * (c.depth + 1)


def site_value(c: Circuit, tr: Sequence[int], site: Site) -> int:
    """Fault-free value carried by ``site`` given a level trace."""
    if isinstance(site, LevelSite):
        return (tr[site.level] >> (c.n - 1 - site.wire)) & 1
    if isinstance(site, PinSite):
        gate = c.gates[site.gate]
        wire = gate.wires[site.pin]
        return (tr[c.levels[site.gate] - 1] >> (c.n - 1 - wire)) & 1
    return (tr[-1] >> (c.n - 1 - site.wire)) & 1


def gate_input(c: Circuit, tr: Sequence[int], g: int) -> int:
    state = tr[c.levels[g] - 1]
    pat = 0
    for w in c.gates[g].wires:
        pat = (pat << 1) | ((state >> (c.n - 1 - w)) & 1)
    return pat


def _check_fault(c: Circuit, f: Fault) -> None:
    if isinstance(f, CellFault):
        if not 0 <= f.gate < len(c.gates) or f.pattern >> c.gates[f.gate].size:
            raise CircuitError(f"{f} does not fit the circuit")
        return
    s = f.site
    ok = ((isinstance(s, LevelSite) and 0 <= s.level <= c.depth and 0 <= s.wire < c.n)
          or (isinstance(s, PinSite) and 0 <= s.gate < len(c.gates)
              and 0 <= s.pin < c.gates[s.gate].size)
          or (isinstance(s, OutputPin) and 0 <= s.wire < c.n))
    if not ok or f.polarity not in (0, 1):
        raise CircuitError(f"{f} does not fit the circuit")


def detects(c: Circuit, t, f: Fault) -> bool:
    """Analytic detection: the site carries the opposite of the stuck value,
    or the gate sees the required pattern."""
    _check_fault(c, f)
    tr = trace(c, t)
    if isinstance(f, CellFault):
        return gate_input(c, tr, f.gate) == f.pattern
    return site_value(c, tr, f.site) != f.polarity


def detected(c: Circuit, t, universe: FaultUniverse) -> list[Fault]:
    """All faults of ``universe`` detected by one vector."""
    mask = detection_matrix(c, [_value(t, c.n)[0]], universe)[:, 0]
    return [f for f, hit in zip(universe.faults, mask) if hit]


def detection_matrix(c: Circuit, vectors: Sequence[int] | np.ndarray,
                     universe: FaultUniverse) -> np.ndarray:
    """Boolean (faults x vectors) incidence, row order = ``universe.faults``."""
    vals = np.ascontiguousarray(vectors, dtype=np.uint64)
    if universe.model == "cell":
        pats = gate_patterns(c, vals)
        g = np.array([f.gate for f in universe.faults], dtype=np.int64)
        a = np.array([f.pattern for f in universe.faults], dtype=np.uint8)
        return pats[:, g].T == a[:, None]
    states = level_states(c, vals)
    lvl = np.empty(len(universe.faults), dtype=np.int64)
    shift = np.empty(len(universe.faults), dtype=np.uint64)
    pol = np.empty(len(universe.faults), dtype=np.uint64)
    for r, f in enumerate(universe.faults):
        s = f.site
        if isinstance(s, LevelSite):
            lvl[r], w = s.level, s.wire
        elif isinstance(s, PinSite):
            lvl[r], w = c.levels[s.gate] - 1, c.gates[s.gate].wires[s.pin]
        else:
            lvl[r], w = c.depth, s.wire
        shift[r] = c.n - 1 - w
        pol[r] = f.polarity
    bits = (states[:, lvl].T >> shift[:, None]) & np.uint64(1)
    return bits != pol[:, None]


def gate_patterns(c: Circuit, vectors: Sequence[int] | np.ndarray) -> np.ndarray:
    """(len(vectors), l) array: input pattern seen by each gate (gate order)."""
    vals = np.ascontiguousarray(vectors, dtype=np.uint64)
    cm, tm, _ = c.program
    order = c.order
    pins = np.zeros((len(order), 3), dtype=np.uint64)
    ks = np.zeros(len(order), dtype=np.int64)
    for pos, g in enumerate(order):
        gate = c.gates[g]
        ks[pos] = gate.size
        for p, w in enumerate(gate.wires):
            pins[pos, p] = wire_bit(w, c.n)
    pats = kernels.impl.gate_inputs(vals, cm, tm, pins, ks)
    out = np.empty_like(pats)
    out[:, list(order)] = pats
    return out


# --- behavioural fault injection --------------------------------------------

def _force_arrays(c: Circuit, mfs: Sequence[MultipleFault]):
    m, d, l = len(mfs), c.depth, len(c.gates)
    lvl_clear = np.zeros((m, d + 1), dtype=np.uint64)
    lvl_set = np.zeros((m, d + 1), dtype=np.uint64)
    pin_clear = np.zeros((m, l), dtype=np.uint64)
    pin_set = np.zeros((m, l), dtype=np.uint64)
    out_clear = np.zeros(m, dtype=np.uint64)
    out_set = np.zeros(m, dtype=np.uint64)
    position = {g: pos for pos, g in enumerate(c.order)}
    for i, mf in enumerate(mfs):
        for f in mf.faults:
            _check_fault(c, f)
            s = f.site
            if isinstance(s, LevelSite):
                row, col, bit = (lvl_clear, lvl_set), s.level, wire_bit(s.wire, c.n)
            elif isinstance(s, PinSite):
                w = c.gates[s.gate].wires[s.pin]
                row, col, bit = (pin_clear, pin_set), position[s.gate], wire_bit(w, c.n)
            else:
                row, col, bit = (out_clear, out_set), None, wire_bit(s.wire, c.n)
            target = row[f.polarity]
            if col is None:
                target[i] |= np.uint64(bit)
            else:
                target[i, col] |= np.uint64(bit)
    return lvl_clear, lvl_set, pin_clear, pin_set, out_clear, out_set


def inject_batch(c: Circuit, vectors: Sequence[int], mfs: Sequence[MultipleFault]) -> np.ndarray:
    """Faulty outputs, shape (len(mfs), len(vectors)).

    Level sites are forced after the gates of their level fire, pin sites
    just before their gate reads its inputs, output pins last.
    """
    vals = np.ascontiguousarray(vectors, dtype=np.uint64)
    cm, tm, b = c.program
    return kernels.impl.inject(vals, cm, tm, b, *_force_arrays(c, mfs))


def inject_and_simulate(c: Circuit, t, mf: MultipleFault | StuckAtFault | Iterable[StuckAtFault]):
    x, _ = _value(t, c.n)
    if isinstance(mf, StuckAtFault):
        mf = MultipleFault((mf,))
    elif not isinstance(mf, MultipleFault):
        faults = tuple(mf)
        if not faults:
            return simulate(c, x)
        mf = MultipleFault(faults)
    return int(inject_batch(c, [x], [mf])[0, 0])


def simulate_cell_fault(c: Circuit, t, gate: int, table: Sequence[int]) -> int:
    """Run ``t`` with gate ``gate`` replaced by the permutation ``table`` of its
    2^k input patterns (pin order, first pin MSB)."""
    x, _ = _value(t, c.n)
    g_obj = c.gates[gate]
    if sorted(table) != list(range(1 << g_obj.size)):
        raise ValueError("faulty gate table must be a permutation of its patterns")
    bits = [wire_bit(w, c.n) for w in g_obj.wires]
    for i, g in enumerate(c.gates):
        if i != gate:
            x = g.apply(x, c.n)
            continue
        pat = 0
        for b in bits:
            pat = (pat << 1) | (1 if x & b else 0)
        new = table[pat]
        for p, b in enumerate(bits):
            if (new >> (len(bits) - 1 - p)) & 1:
                x |= b
            else:
                x &= ~b
    return x


def gate_table(gate_size: int) -> list[int]:
    """Truth table of the fault-free NCT gate of a given size."""
    full = (1 << gate_size) - 1
    return [a ^ 1 if a | 1 == full else a for a in range(1 << gate_size)]
