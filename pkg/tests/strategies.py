"""Hypothesis strategies for circuits."""
from hypothesis import strategies as st

from revtest.circuit import Circuit, Gate


@st.composite
def gates(draw, n, max_size=3):
    k = draw(st.integers(1, min(max_size, n)))
    wires = draw(st.permutations(range(n)))[:k]
    return Gate(tuple(sorted(wires[1:])), wires[0])


@st.composite
def circuits(draw, min_n=1, max_n=6, max_len=12, max_size=3):
    n = draw(st.integers(min_n, max_n))
    gs = draw(st.lists(gates(n, max_size), max_size=max_len))
    return Circuit(n, tuple(gs))


def as_pairs(c):
    return [(g.controls, g.target) for g in c.gates]
