"""Fault models, completeness checks and test-set generation for reversible
circuits built from NOT, C-NOT and Toffoli gates."""
from .circuit import (BitVector, Circuit, CircuitError, Gate, ParseError, emit_circuit,
                      parse_circuit, read_circuit, simulate, simulate_batch, simulate_inverse,
                      trace)
from .completeness import CheckResult, TestSet, build_matrix, check
from .constructive import (bounds, gen_cell_backsolve, gen_enumerative, gen_greedy,
                           gen_inverse_complement, gen_linear, generate, staircase)
from .cover import CoverProblem, InfeasibleError, compact, min_test_set, solve_exact
from .decomposition import PartialVector, decompose, partition
from .decomposition import run as decomp_run
from .faults import CellFault, MultipleFault, StuckAtFault, detects, enumerate_faults
from .kernels import BACKEND

__version__ = "0.1.0"
