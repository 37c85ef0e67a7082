"""Reversible NCT circuits: representation, leveling, parsing and simulation.

Bit convention used throughout the package: an n-wire value is a Python int
whose binary expansion, written MSB first with n digits, lists wires 0..n-1
left to right.  So on three wires the string ``"010"`` is the int 2 and wire 0
is bit ``n - 1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels

MAX_WIRES = 64


class CircuitError(ValueError):
    """Raised for malformed circuits or out-of-range arguments."""


class ParseError(CircuitError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class BitVector:
    """Value of ``width`` wires packed into one int (wire 0 is the MSB)."""

    width: int
    bits: int

    def __post_init__(self):
        if not 1 <= self.width <= MAX_WIRES:
            raise CircuitError(f"width must be in 1..{MAX_WIRES}, got {self.width}")
        if self.bits < 0 or self.bits >> self.width:
            raise CircuitError(f"value {self.bits} does not fit in {self.width} bits")

    @classmethod
    def parse(cls, text: str) -> "BitVector":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise CircuitError(f"not a binary vector: {text!r}")
        return cls(len(text), int(text, 2))

    @classmethod
    def zeros(cls, width: int) -> "BitVector":
        return cls(width, 0)

    @classmethod
    def ones(cls, width: int) -> "BitVector":
        return cls(width, (1 << width) - 1)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.width}b")

    def __int__(self) -> int:
        return self.bits

    def __invert__(self) -> "BitVector":
        return BitVector(self.width, ~self.bits & ((1 << self.width) - 1))

    def __getitem__(self, wire: int) -> int:
        return (self.bits >> (self.width - 1 - wire)) & 1

    @property
    def weight(self) -> int:
        return self.bits.bit_count()


def to_str(value: int, width: int) -> str:
    return format(value, f"0{width}b")


def wire_bit(wire: int, width: int) -> int:
    """Mask of ``wire`` in an int of ``width`` bits."""
    return 1 << (width - 1 - wire)


@dataclass(frozen=True)
class Gate:
    """NOT (no controls), C-NOT (one) or Toffoli (two controls)."""

    controls: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        if len(self.controls) > 2:
            raise CircuitError(f"unsupported gate size {len(self.controls) + 1} (NCT only)")
        if len(set(self.wires)) != len(self.wires):
            raise CircuitError(f"gate uses a wire twice: {self.wires}")
        if min(self.wires) < 0:
            raise CircuitError(f"negative wire index in {self.wires}")

    @property
    def size(self) -> int:
        return len(self.controls) + 1

    @property
    def wires(self) -> tuple[int, ...]:
        """Pins in order: controls first, target last."""
        return self.controls + (self.target,)

    def masks(self, width: int) -> tuple[int, int]:
        cmask = 0
        for c in self.controls:
            cmask |= wire_bit(c, width)
        return cmask, wire_bit(self.target, width)

    def apply(self, value: int, width: int) -> int:
        cmask, tmask = self.masks(width)
        return value ^ tmask if value & cmask == cmask else value


GateLike = Union[Gate, tuple]


def _as_gate(g: GateLike) -> Gate:
    if isinstance(g, Gate):
        return g
    controls, target = g
    return Gate(tuple(controls), target)


@dataclass(frozen=True)
class LevelTrace:
    """Wire values at every level 0..d for one input vector."""

    width: int
    values: tuple[int, ...]

    def __len__(self):
        return len(self.values)

    def __getitem__(self, level: int) -> int:
        return self.values[level]

    def __iter__(self):
        return iter(self.values)

    def as_strings(self) -> list[str]:
        return [to_str(v, self.width) for v in self.values]


@dataclass(frozen=True, eq=False)
class Circuit:
    """A well-formed reversible circuit on ``n`` wires.

    Gate output levels follow the dependency rule: a gate sits one level above
    the deepest of its input wires, so gates on one level touch disjoint wires.
    """

    n: int
    gates: tuple[Gate, ...] = ()
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not 1 <= self.n <= MAX_WIRES:
            raise CircuitError(f"wire count must be in 1..{MAX_WIRES}, got {self.n}")
        gates = tuple(_as_gate(g) for g in self.gates)
        for g in gates:
            if max(g.wires) >= self.n:
                raise CircuitError(f"gate {g} uses a wire outside 0..{self.n - 1}")
        object.__setattr__(self, "gates", gates)
        names = tuple(self.names) or tuple(f"x{i}" for i in range(self.n))
        if len(names) != self.n or len(set(names)) != self.n:
            raise CircuitError("wire names must be distinct, one per wire")
        object.__setattr__(self, "names", names)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.n, self.gates, self.names) == (other.n, other.gates, other.names)

    def __hash__(self):
        return hash((self.n, self.gates, self.names))

    def __len__(self):
        return len(self.gates)

    def __repr__(self):
        return f"Circuit(n={self.n}, length={len(self.gates)}, depth={self.depth})"

    @cached_property
    def levels(self) -> tuple[int, ...]:
        current = [0] * self.n
        out = []
        for g in self.gates:
            lvl = 1 + max(current[w] for w in g.wires)
            for w in g.wires:
                current[w] = lvl
            out.append(lvl)
        return tuple(out)

    @property
    def depth(self) -> int:
        return max(self.levels, default=0)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(g.size for g in self.gates)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def order(self) -> tuple[int, ...]:
        """Gate indices sorted by (level, position)."""
        return tuple(sorted(range(len(self.gates)), key=lambda i: (self.levels[i], i)))

    @cached_property
    def bounds(self) -> tuple[int, ...]:
        """``bounds[j]`` = number of gates whose output level is <= j."""
        counts = [0] * (self.depth + 1)
        for lvl in self.levels:
            counts[lvl] += 1
        out, acc = [], 0
        for c in counts:
            acc += c
            out.append(acc)
        return tuple(out)

    @cached_property
    def _masks(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.gates[i].masks(self.n) for i in self.order)

    @cached_property
    def program(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Level-ordered (control masks, target masks, bounds) for the kernels."""
        cm = np.array([m[0] for m in self._masks], dtype=np.uint64)
        tm = np.array([m[1] for m in self._masks], dtype=np.uint64)
        return cm, tm, np.array(self.bounds, dtype=np.int64)

    def gate_level(self, g: int) -> int:
        return self.levels[g]

    def support(self) -> tuple[int, ...]:
        return tuple(sorted({w for g in self.gates for w in g.wires}))

    def inverse(self) -> "Circuit":
        return Circuit(self.n, tuple(reversed(self.gates)), self.names)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise CircuitError("cannot concatenate circuits of different widths")
        return Circuit(self.n, self.gates + other.gates, self.names)

    def slice(self, start: int, stop: int) -> "Circuit":
        return Circuit(self.n, self.gates[start:stop], self.names)


def _value(v, n: int) -> tuple[int, bool]:
    if isinstance(v, BitVector):
        if v.width != n:
            raise CircuitError(f"vector width {v.width} != circuit width {n}")
        return v.bits, True
    if isinstance(v, str):
        bv = BitVector.parse(v)
        if bv.width != n:
            raise CircuitError(f"vector width {bv.width} != circuit width {n}")
        return bv.bits, False
    v = int(v)
    if v < 0 or v >> n:
        raise CircuitError(f"value {v} does not fit in {n} wires")
    return v, False


def _check_levels(c: Circuit, i: int, j: int | None) -> tuple[int, int]:
    if j is None:
        j = c.depth
    if not 0 <= i <= j <= c.depth:
        raise CircuitError(f"levels must satisfy 0 <= {i} <= {j} <= depth {c.depth}")
    return i, j


def simulate(c: Circuit, v, from_level: int = 0, to_level: int | None = None):
    """Apply the sub-circuit between two levels (f_{i,j}) to ``v``.

    Accepts an int, a binary string or a BitVector; BitVector in gives
    BitVector out, anything else gives an int.
    """
    x, boxed = _value(v, c.n)
    i, j = _check_levels(c, from_level, to_level)
    b = c.bounds
    for cm, tm in c._masks[b[i]:b[j]]:
        if x & cm == cm:
            x ^= tm
    return BitVector(c.n, x) if boxed else x


def simulate_inverse(c: Circuit, v, from_level: int = 0, to_level: int | None = None):
    """Apply the inverse of the sub-circuit between two levels to ``v``."""
    x, boxed = _value(v, c.n)
    i, j = _check_levels(c, from_level, to_level)
    b = c.bounds
    for cm, tm in reversed(c._masks[b[i]:b[j]]):
        if x & cm == cm:
            x ^= tm
    return BitVector(c.n, x) if boxed else x


def trace(c: Circuit, v) -> LevelTrace:
    x, _ = _value(v, c.n)
    out = [x]
    masks, b = c._masks, c.bounds
    for j in range(1, c.depth + 1):
        for cm, tm in masks[b[j - 1]:b[j]]:
            if x & cm == cm:
                x ^= tm
        out.append(x)
    return LevelTrace(c.n, tuple(out))


def simulate_batch(c: Circuit, vectors: Iterable[int], from_level: int = 0,
                   to_level: int | None = None, inverse: bool = False) -> np.ndarray:
    """Vectorised ``simulate``/``simulate_inverse`` over many inputs."""
    i, j = _check_levels(c, from_level, to_level)
    vals = np.array(list(vectors), dtype=np.uint64)
    cm, tm, _ = c.program
    b = c.bounds
    fn = kernels.impl.inverse if inverse else kernels.impl.forward
    fn(vals, cm, tm, b[i], b[j])
    return vals


def level_states(c: Circuit, vectors: Sequence[int] | np.ndarray) -> np.ndarray:
    """(len(vectors), d+1) array of wire values at every level."""
    vals = np.ascontiguousarray(vectors, dtype=np.uint64)
    cm, tm, b = c.program
    return kernels.impl.level_states(vals, cm, tm, b)


# --- text format -----------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_\[\]']*\Z")
_GATE = re.compile(r"t(\d+)\Z")


def parse_circuit(text: str) -> Circuit:
    """Parse the ``.v`` / ``tK`` circuit format (RevLib .tfc subset)."""
    names: list[str] | None = None
    index: dict[str, int] = {}
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip("\r").strip()
        if not line:
            continue
        col = raw.index(line[0]) + 1
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == ".v":
            if names is not None:
                raise ParseError("duplicate .v header", lineno, col)
            names = [w.strip() for w in rest.split(",")] if rest else []
            for w in names:
                if not _NAME.match(w):
                    raise ParseError(f"bad wire name {w!r}", lineno, col)
            if len(set(names)) != len(names):
                raise ParseError("duplicate wire name in .v", lineno, col)
            if not 1 <= len(names) <= MAX_WIRES:
                raise ParseError(f"wire count must be in 1..{MAX_WIRES}", lineno, col)
            index = {w: i for i, w in enumerate(names)}
            continue
        if head in (".i", ".o", ".c", ".ol", "BEGIN", "END"):
            continue
        m = _GATE.match(head)
        if not m:
            raise ParseError(f"unexpected token {head!r}", lineno, col)
        if names is None:
            raise ParseError("gate before .v header", lineno, col)
        arity = int(m.group(1))
        if not 1 <= arity <= 3:
            raise ParseError(f"unsupported gate arity {arity} (NCT only)", lineno, col)
        wires = [w.strip() for w in rest.split(",")] if rest else []
        if len(wires) != arity:
            raise ParseError(f"t{arity} expects {arity} wires, got {len(wires)}", lineno, col)
        for w in wires:
            if w not in index:
                raise ParseError(f"unknown wire {w!r}", lineno, col + len(head) + 1 + rest.find(w))
        if len(set(wires)) != len(wires):
            raise ParseError(f"duplicate wire in gate: {rest}", lineno, col)
        ids = [index[w] for w in wires]
        gates.append(Gate(tuple(ids[:-1]), ids[-1]))
    if names is None:
        raise ParseError("missing .v header", 1)
    return Circuit(len(names), tuple(gates), tuple(names))


def emit_circuit(c: Circuit) -> str:
    lines = [".v " + ",".join(c.names)]
    for g in c.gates:
        lines.append(f"t{g.size} " + ",".join(c.names[w] for w in g.wires))
    return "\n".join(lines) + "\n"


def read_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())
