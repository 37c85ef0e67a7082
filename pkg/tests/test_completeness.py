import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from strategies import as_pairs, circuits
from revtest.circuit import Circuit, CircuitError
from revtest.completeness import TestSet, build_matrix, check, is_complete_cell, is_complete_stuck_at
from revtest.faults import detects

# "wire is 1" block for the three-wire example, rows (level, wire), columns t_0..t_7
THREE_WIRE_ONES = [
    "00001111", "00110011", "01010101",
    "00001111", "00111100", "01010101",
    "00001111", "00111100", "01101001",
]


def test_three_wire_sets(three_wire):
    assert check(three_wire, ["000", "010", "111"]).complete
    res = check(three_wire, ["000"])
    assert not res and all(v == 1 for _, _, v in res.uncovered) and len(res.uncovered) == 9
    assert check(three_wire, ["000", "111", "101", "100"]).complete


def test_three_wire_cell_sets(three_wire):
    assert check(three_wire, ["000", "011", "111", "100"], "cell").complete
    res = check(three_wire, ["000", "010", "111"], "cell")
    assert not res.complete and res.uncovered == ((0, 0b10), (1, 0b11))


def test_three_wire_no_three_vectors_cell_complete(three_wire):
    for combo in itertools.combinations(range(8), 3):
        assert not is_complete_cell(three_wire, combo).complete


@given(circuits(max_n=6, max_len=10))
def test_all_inputs_complete(c):
    every = range(1 << c.n)
    assert is_complete_stuck_at(c, every).complete
    assert is_complete_cell(c, every).complete


@settings(max_examples=80, deadline=None)
@given(circuits(max_n=5, max_len=8), st.data())
def test_check_matches_oracle(c, data):
    tests = data.draw(st.sets(st.integers(0, c.full_mask), max_size=6))
    assert check(c, tests, "sa").complete == oracles.complete_sa(c.n, as_pairs(c), tests)
    assert check(c, tests, "cell").complete == oracles.complete_cell(c.n, as_pairs(c), tests)


def test_matrix_three_wire(three_wire):
    m = build_matrix(three_wire, "sa")
    assert m.shape == (18, 8)
    ones = np.array([[int(ch) for ch in row] for row in THREE_WIRE_ONES], dtype=bool)
    assert np.array_equal(m.incidence[:9], ones)
    assert np.array_equal(m.incidence[9:], ~ones)
    assert m.row_label(0) == (0, 0, 1) and m.row_label(17) == (2, 2, 0)


def test_matrix_empty_circuit():
    # level 0 only: one row per (wire, value)
    m = build_matrix(Circuit(2), "sa")
    assert m.shape == (4, 4)
    assert m.incidence.sum(axis=1).tolist() == [2, 2, 2, 2]


@settings(max_examples=40, deadline=None)
@given(circuits(max_n=5, max_len=8))
def test_matrix_agrees_with_detects(c):
    for model in ("sa", "cell"):
        m = build_matrix(c, model)
        for r in range(0, len(m.rows), max(1, len(m.rows) // 7)):
            for col, x in enumerate(m.columns):
                assert m.incidence[r, col] == detects(c, x, m.rows[r])


@given(circuits(max_n=6, max_len=10))
def test_matrix_row_sums(c):
    sa = build_matrix(c, "sa").incidence
    assert (sa.sum(axis=1) == 1 << (c.n - 1)).all()
    cm = build_matrix(c, "cell")
    assert cm.incidence.sum(axis=1).tolist() == [1 << (c.n - f.size) for f in cm.rows]


def test_matrix_candidates_and_overflow(three_wire):
    m = build_matrix(three_wire, "sa", candidates=["111", "000"])
    assert m.columns == (7, 0) and m.shape == (18, 2)
    with pytest.raises(CircuitError):
        build_matrix(Circuit(21), "sa")


def test_testset():
    t = TestSet.parse(3, "000, 010;111")
    assert t.strings() == ["000", "010", "111"] and t.width == 3
    assert TestSet.dedup(3, [1, 1, 2]) == (1, 2)
    with pytest.raises(CircuitError):
        TestSet(3, [1, 1])
    with pytest.raises(CircuitError):
        TestSet.parse(3, "0000")


def test_check_json(three_wire):
    js = check(three_wire, ["000", "010", "111"], "cell").as_json()
    assert js["complete"] is False and js["uncovered"][0].keys() == {"gate", "pattern"}
