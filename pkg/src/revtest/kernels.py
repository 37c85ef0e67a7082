"""Backend selection for the gate-program kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation takes over.  Setting ``REVTEST_PURE_PYTHON=1`` forces the
fallback, which the test suite and the benchmark use to compare both.
"""
import os
from types import ModuleType

from . import _kernels_py


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("REVTEST_PURE_PYTHON") == "1":
        return _kernels_py, "python"
    try:
        from . import _kernels
    except ImportError:
        return _kernels_py, "python"
    return _kernels, "cython"


impl, BACKEND = _load()


def backends() -> dict[str, ModuleType]:
    """All importable backends, keyed by name."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found


def use(name: str) -> None:
    """Switch the active backend (``"cython"`` or ``"python"``)."""
    global impl, BACKEND
    impl = backends()[name]
    BACKEND = name
