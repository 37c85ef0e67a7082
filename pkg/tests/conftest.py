import sys
from pathlib import Path

import pytest

from revtest import kernels
from revtest.circuit import read_circuit

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def three_wire():
    """a -> b, then b -> c: two C-NOTs in series."""
    return read_circuit(DATA / "three_wire.v")


@pytest.fixture
def six_wire():
    return read_circuit(DATA / "six_wire_decomp.v")


@pytest.fixture(scope="session")
def catalog():
    from revtest.bench import enumerate_optimal_3wire
    return enumerate_optimal_3wire()


@pytest.fixture(scope="session")
def sa_table(catalog):
    from revtest.bench import size_table
    return size_table(catalog, "sa")


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request):
    """Run the test once per available kernel backend."""
    old = kernels.BACKEND
    kernels.use(request.param)
    yield request.param
    kernels.use(old)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
