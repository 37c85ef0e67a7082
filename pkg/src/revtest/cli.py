"""Command-line entry point: ``revtest <verb> ...``.

Every verb prints one JSON document (bench prints CSV).  Exit codes: 0 on
success, 1 on domain errors or an incomplete ``check``, 2 on usage errors,
3 when a file cannot be read or parsed.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass, field

from . import bench as bench_mod
from . import decomposition
from .circuit import CircuitError, ParseError, emit_circuit, read_circuit, simulate, simulate_inverse, to_str, trace
from .completeness import TestSet, check
from .constructive import bounds, generate
from .cover import IncompleteTestSetError, InfeasibleError, compact_solution, min_test_solution
from .faults import enumerate_faults

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_FILE = 0, 1, 2, 3
GEN_STRATEGIES = ("enum", "invcomp", "greedy", "linear", "cellback", "decomp", "exact")


class FileProblem(Exception):
    pass


@dataclass
class RunReport:
    verb: str
    inputs: dict
    model: str | None
    payload: object = None
    exit_code: int = EXIT_OK
    text: str | None = None  # non-JSON output (CSV, fault listings)
    notes: list = field(default_factory=list)  # extra lines for stderr


def _load(path):
    try:
        return read_circuit(path)
    except ParseError as e:
        raise FileProblem(f"{path}: {e}") from e
    except OSError as e:
        raise FileProblem(f"{path}: {e.strerror or e}") from e


def _tests(args, n):
    if args.tests_file:
        try:
            with open(args.tests_file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise FileProblem(f"{args.tests_file}: {e.strerror or e}") from e
        text = ",".join(line.split("#", 1)[0].strip() for line in text.splitlines())
    elif args.tests is not None:
        text = args.tests
    else:
        raise CircuitError("give --tests or --tests-file")
    return TestSet.parse(n, text)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _sizes(text: str) -> dict:
    """``3:1000000,2:5`` -> {3: 1000000, 2: 5}."""
    out = {}
    try:
        for item in text.split(","):
            k, _, v = item.partition(":")
            out[int(k)] = int(v) if v else 1
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected size:count pairs, got {text!r}")
    return out


# --- verbs -------------------------------------------------------------------

def cmd_parse(args, rep):
    c = _load(args.circuit)
    rep.payload = {"n": c.n, "names": list(c.names), "length": len(c.gates), "depth": c.depth,
                   "gates": [{"controls": list(g.controls), "target": g.target} for g in c.gates],
                   "levels": list(c.levels)}


def cmd_simulate(args, rep):
    c = _load(args.circuit)
    if args.trace:
        rep.payload = trace(c, args.vector).as_strings()
        return
    fn = simulate_inverse if args.inverse else simulate
    rep.payload = to_str(fn(c, args.vector, args.from_level, args.to_level), c.n)


def cmd_faults(args, rep):
    c = _load(args.circuit)
    u = enumerate_faults(c, args.model, args.convention)
    if args.format == "text":
        rep.text = u.report()
        return
    rep.payload = {"model": u.model, "convention": u.convention, "count": len(u),
                   "faults": [str(f) for f in u.faults]}


def cmd_check(args, rep):
    c = _load(args.circuit)
    res = check(c, _tests(args, c.n), args.model)
    rep.payload = res.as_json()
    rep.exit_code = EXIT_OK if res.complete else EXIT_DOMAIN


def cmd_gen(args, rep):
    c = _load(args.circuit)
    if args.strategy == "greedy" and args.seed is None:
        raise CircuitError("greedy generation needs --seed")
    if args.strategy == "decomp":
        tests = decomposition.run(c, min(args.max_wires, c.n), args.model)
    elif args.strategy == "exact":
        tests = min_test_solution(c, args.model, args.node_limit)[0]
    else:
        tests = generate(c, args.strategy, args.model, seed=args.seed or 0)
    rep.payload = {"strategy": args.strategy, "model": args.model, "size": len(tests),
                   "vectors": tests.strings()}


def cmd_solve(args, rep):
    c = _load(args.circuit)
    tests, sol = min_test_solution(c, args.model, args.node_limit)
    rep.payload = {"model": args.model, "size": len(tests), "vectors": tests.strings(),
                   "optimal": sol.optimal, "nodes": sol.nodes}


def cmd_compact(args, rep):
    c = _load(args.circuit)
    before = _tests(args, c.n)
    tests, sol = compact_solution(c, before, args.model, args.node_limit)
    rep.payload = {"model": args.model, "size_before": len(before), "size": len(tests),
                   "vectors": tests.strings(), "optimal": sol.optimal}


def cmd_decomp(args, rep):
    c = _load(args.circuit)
    res = decomposition.decompose(c, args.max_wires, args.model, args.node_limit,
                                  record=args.verbose)
    if not check(c, res.test_set, args.model).complete:
        raise AssertionError("decomposition produced an incomplete test set")
    steps = []
    for st in res.steps:
        steps.append({"index": st.index, "gates": [st.start, st.stop],
                      "support": [c.names[w] for w in st.support], "claimants": st.claimants,
                      "new_vectors": st.new_vectors, "optimal": st.optimal, "nodes": st.nodes})
        if args.verbose:
            rep.notes.append(f"C{st.index}: gates {st.start}..{st.stop - 1} on "
                             + ",".join(c.names[w] for w in st.support))
            rep.notes.append(decomposition.format_table(
                [decomposition.PartialVector.parse(s) for s in st.before], c.names))
            rep.notes.append("  after:")
            rep.notes.append(decomposition.format_table(
                [decomposition.PartialVector.parse(s) for s in st.after], c.names))
    rep.payload = {"model": args.model, "max_wires": args.max_wires, "size": len(res.test_set),
                   "seeds": res.seeds, "vectors": res.test_set.strings(), "steps": steps}


def cmd_bound(args, rep):
    if args.circuit:
        report = bounds(_load(args.circuit), args.model)
    else:
        if args.n is None or args.sizes is None:
            raise CircuitError("give a circuit file or --n and --sizes")
        report = bounds(None, args.model, n=args.n, d=args.depth, sizes=args.sizes)
    rep.payload = report.as_json()


def cmd_random(args, rep):
    c = bench_mod.random_circuit(args.n, args.length, args.seed, args.library)
    rep.payload = {"n": args.n, "length": args.length, "seed": args.seed,
                   "library": args.library, "circuit": emit_circuit(c)}


def cmd_enum3(args, rep):
    cat = bench_mod.enumerate_optimal_3wire()
    out = cat.as_json()
    if not args.no_table:
        out["distribution"] = bench_mod.size_table(cat, args.model).as_json()
    if args.catalog:
        out["catalog"] = [{"perm": list(cat.perm(r)), "length": int(cat.lengths[r]),
                           "circuit": ";".join(f"t{g.size} " + ",".join("abc"[w] for w in g.wires)
                                               for g in cat.circuit(r).gates)}
                          for r in range(len(cat))]
    rep.payload = out


def cmd_bench(args, rep):
    cfg = bench_mod.BenchConfig(args.n, args.lengths, args.circuits, args.max_wires, args.model,
                                args.strategy, args.seed, not args.no_compact, args.node_limit)
    records = bench_mod.bench(cfg, args.threads)
    if args.summary:
        rep.payload = [asdict(s) for s in bench_mod.summarize(records)]
        return
    buf = io.StringIO()
    bench_mod.write_csv(records, buf)
    rep.text = buf.getvalue()


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indented JSON")
    common.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=("sa", "cell"), default="sa")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--node-limit", type=int, default=None,
                        help="branch-and-bound node budget (default: unlimited)")

    tests = argparse.ArgumentParser(add_help=False)
    tests.add_argument("--tests", help='comma-separated vectors, wire 0 leftmost: "000,010,111"')
    tests.add_argument("--tests-file", help="one vector per line")

    p = argparse.ArgumentParser(prog="revtest", description="Test generation for reversible NCT circuits.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("parse", parents=[common], help="parse and describe a circuit")
    s.add_argument("circuit")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("simulate", parents=[common], help="run one input vector")
    s.add_argument("circuit")
    s.add_argument("vector")
    s.add_argument("--inverse", action="store_true")
    s.add_argument("--trace", action="store_true", help="print the state at every level")
    s.add_argument("--from-level", type=int, default=0)
    s.add_argument("--to-level", type=int, default=None)
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("faults", parents=[common, model], help="list the fault universe")
    s.add_argument("circuit")
    s.add_argument("--convention", choices=("level", "pin"), default="level")
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(fn=cmd_faults)

    s = sub.add_parser("check", parents=[common, model, tests], help="completeness of a test set")
    s.add_argument("circuit")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("gen", parents=[common, model, budget], help="construct a complete test set")
    s.add_argument("circuit")
    s.add_argument("--strategy", choices=GEN_STRATEGIES, default="invcomp")
    s.add_argument("--max-wires", type=int, default=8, help="sub-circuit width for decomp")
    s.add_argument("--seed", type=int, default=None)
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", parents=[common, model, budget], help="exact minimal test set")
    s.add_argument("circuit")
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("compact", parents=[common, model, budget, tests],
                       help="smallest complete subset of a test set")
    s.add_argument("circuit")
    s.set_defaults(fn=cmd_compact)

    s = sub.add_parser("decomp", parents=[common, model], help="decomposition-based generation")
    s.add_argument("circuit")
    s.add_argument("--max-wires", type=int, required=True)
    s.add_argument("--node-limit", type=int, default=decomposition.DEFAULT_NODE_LIMIT)
    s.add_argument("--verbose", action="store_true", help="per-step vector tables on stderr")
    s.set_defaults(fn=cmd_decomp)

    s = sub.add_parser("bound", parents=[common, model], help="test set size bounds")
    s.add_argument("circuit", nargs="?")
    s.add_argument("--n", type=int)
    s.add_argument("--depth", type=int)
    s.add_argument("--sizes", type=_sizes, help="gate size counts, e.g. 3:1000000")
    s.set_defaults(fn=cmd_bound)

    s = sub.add_parser("random", parents=[common], help="random NCT circuit")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--library", choices=bench_mod.LIBRARIES, default="nct")
    s.set_defaults(fn=cmd_random)

    s = sub.add_parser("enum3", parents=[common, model], help="optimal 3-wire catalog")
    s.add_argument("--no-table", action="store_true", help="skip the minimal test size table")
    s.add_argument("--catalog", action="store_true", help="include every permutation")
    s.set_defaults(fn=cmd_enum3)

    s = sub.add_parser("bench", parents=[common, model], help="size/time sweep as CSV")
    s.add_argument("--n", type=_int_list, required=True, help="e.g. 8,16,24,32")
    s.add_argument("--lengths", type=_int_list, required=True, help="e.g. 100,200,400")
    s.add_argument("--circuits", type=int, default=20)
    s.add_argument("--strategy", choices=bench_mod.STRATEGIES, default="decomp")
    s.add_argument("--max-wires", type=int, default=8)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--node-limit", type=int, default=decomposition.DEFAULT_NODE_LIMIT)
    s.add_argument("--no-compact", action="store_true")
    s.add_argument("--summary", action="store_true", help="per-point means as JSON")
    s.set_defaults(fn=cmd_bench)
    return p


def _emit(rep: RunReport, args) -> None:
    if rep.text is not None:
        out = rep.text
    else:
        out = json.dumps(rep.payload, indent=2 if args.pretty else None) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        except OSError as e:
            raise FileProblem(f"{args.out}: {e.strerror or e}") from e
    else:
        sys.stdout.write(out)
    for line in rep.notes:
        print(line, file=sys.stderr)


def run(argv=None) -> RunReport:
    args = build_parser().parse_args(argv)
    rep = RunReport(args.verb, {k: v for k, v in vars(args).items() if k != "fn"},
                    getattr(args, "model", None))
    try:
        args.fn(args, rep)
        _emit(rep, args)
    except FileProblem as e:
        print(f"revtest: {e}", file=sys.stderr)
        rep.exit_code = EXIT_FILE
    except (CircuitError, ValueError, InfeasibleError, IncompleteTestSetError) as e:
        print(f"revtest {args.verb}: {e}", file=sys.stderr)
        rep.exit_code = EXIT_DOMAIN
    return rep


def main(argv=None) -> int:
    return run(argv).exit_code


if __name__ == "__main__":
    sys.exit(main())
