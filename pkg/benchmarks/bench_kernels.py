"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --n 32 --length 1600 --vectors 4096
"""
import argparse
import time

import numpy as np

from revtest import kernels
from revtest.bench import random_circuit
from revtest.faults import LevelSite, MultipleFault, StuckAtFault, _force_arrays


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--length", type=int, default=1600)
    ap.add_argument("--vectors", type=int, default=4096)
    ap.add_argument("--faults", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    c = random_circuit(args.n, args.length, args.seed)
    rng = np.random.default_rng(args.seed)
    vals = rng.integers(0, 1 << args.n, size=args.vectors, dtype=np.uint64)
    cm, tm, b = c.program
    full = np.uint64(c.full_mask)
    mfs = [MultipleFault((StuckAtFault(LevelSite(int(rng.integers(c.depth + 1)),
                                                 int(rng.integers(c.n))), int(rng.integers(2))),))
           for _ in range(args.faults)]
    forces = _force_arrays(c, mfs)
    inj_vals = vals[:64].copy()

    cases = {
        "forward": lambda impl: impl.forward(vals.copy(), cm, tm, 0, len(cm)),
        "level_states": lambda impl: impl.level_states(vals, cm, tm, b),
        "coverage": lambda impl: impl.coverage(vals, cm, tm, b, full),
        "inject": lambda impl: impl.inject(inj_vals, cm, tm, b, *forces),
    }
    names = [n for n in ("cython", "python") if n in kernels.backends()]
    print(f"n={c.n} gates={len(c.gates)} depth={c.depth} vectors={args.vectors}")
    print(f"{'kernel':<14}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases.items():
        times = [_time(lambda: fn(kernels.backends()[n]), args.repeat) for n in names]
        row = f"{label:<14}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
