import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from revtest.cli import main, run

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"
THREE = str(DATA / "three_wire.v")

# (argv after the circuit path, golden file, schema)
TRANSCRIPTS = [
    (["parse"], "parse.json", "parse"),
    (["simulate", "{c}", "010"], "simulate.json", "simulate"),
    (["simulate", "{c}", "011", "--trace"], "trace.json", "simulate"),
    (["faults", "{c}", "--convention", "pin"], "faults_pin.json", "faults"),
    (["faults", "{c}", "--model", "cell", "--format", "text"], "faults_cell.txt", None),
    (["check", "{c}", "--tests", "000,010,111"], "check.json", "check"),
    (["check", "{c}", "--model", "cell", "--tests", "000,010,111"], "check_cell.json", "check"),
    (["gen", "{c}", "--strategy", "invcomp"], "gen_invcomp.json", "gen"),
    (["solve", "{c}"], "solve.json", "solve"),
    (["solve", "{c}", "--model", "cell"], "solve_cell.json", "solve"),
    (["compact", "{c}", "--tests", "000,001,010,011,100,101,110,111"], "compact.json", "compact"),
    (["decomp", "{c}", "--max-wires", "3"], "decomp.json", "decomp"),
    (["bound", "{c}", "--model", "cell"], "bound_cell.json", "bound"),
]


def _schema(name):
    text = resources.files("revtest").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def _argv(parts):
    argv = [p.format(c=THREE) for p in parts]
    return argv if "{c}" in parts else argv + [THREE]


def _validate(name, doc):
    schema = _schema(name)
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(doc, schema)


@pytest.mark.parametrize("parts,golden,schema", TRANSCRIPTS, ids=[t[1] for t in TRANSCRIPTS])
def test_golden_transcripts(capsys, parts, golden, schema):
    code = main(_argv(parts))
    out = capsys.readouterr().out
    assert out == (GOLDEN / golden).read_text()
    expected = 1 if golden == "check_cell.json" else 0
    assert code == expected
    if schema:
        _validate(schema, json.loads(out))


def test_every_schema_is_valid():
    names = [p.name for p in resources.files("revtest").joinpath("schemas").iterdir()]
    assert len(names) == 12
    for name in names:
        jsonschema.Draft202012Validator.check_schema(_schema(name[:-5]))


def test_gen_strategies(capsys):
    for strategy in ("enum", "invcomp", "linear", "cellback", "decomp", "exact"):
        model = "cell" if strategy == "cellback" else "sa"
        assert main(["gen", THREE, "--strategy", strategy, "--model", model]) == 0
        doc = json.loads(capsys.readouterr().out)
        _validate("gen", doc)
        assert main(["check", THREE, "--model", model, "--tests", ",".join(doc["vectors"])]) == 0
        capsys.readouterr()


def test_greedy_requires_seed(capsys):
    assert main(["gen", THREE, "--strategy", "greedy"]) == 1
    assert "--seed" in capsys.readouterr().err
    assert main(["gen", THREE, "--strategy", "greedy", "--seed", "3"]) == 0


def test_random_and_round_trip(capsys, tmp_path):
    assert main(["random", "--n", "5", "--length", "12", "--seed", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    _validate("random", doc)
    path = tmp_path / "r.v"
    path.write_text(doc["circuit"])
    assert main(["parse", str(path)]) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert parsed["n"] == 5 and parsed["length"] == 12


def test_bound_from_sizes(capsys):
    assert main(["bound", "--model", "cell", "--n", "64", "--sizes", "3:1000000"]) == 0
    doc = json.loads(capsys.readouterr().out)
    _validate("bound", doc)
    assert doc["bound_b"] == 7000001 and doc["iterated_bound"] == 108
    assert main(["bound", "--n", "64", "--sizes", "3:1000000"]) == 0
    assert json.loads(capsys.readouterr().out)["bound_c"] == 23
    assert main(["bound", "--n", "64"]) == 1


def test_enum3_without_table(capsys):
    assert main(["enum3", "--no-table"]) == 0
    doc = json.loads(capsys.readouterr().out)
    _validate("enum3", doc)
    assert doc["histogram"][-1] == 577


def test_bench_csv_and_summary(capsys):
    argv = ["bench", "--n", "8", "--lengths", "0,10", "--circuits", "2", "--seed", "0"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n,length,seed") and len(lines) == 5
    assert main(argv + ["--summary"]) == 0
    doc = json.loads(capsys.readouterr().out)
    _validate("bench", doc)
    assert [p["length"] for p in doc] == [0, 10]


def test_decomp_verbose(capsys):
    assert main(["decomp", str(DATA / "six_wire_decomp.v"), "--max-wires", "4", "--verbose"]) == 0
    cap = capsys.readouterr()
    doc = json.loads(cap.out)
    assert doc["size"] == 4 and doc["seeds"] == 3
    assert "C0: gates 0..1 on x1,x2,x4,x5" in cap.err
    rows = [line.split() for line in cap.err.splitlines()]
    assert list("X00X00") in rows and list("X11X10") in rows


def test_out_and_pretty(tmp_path, capsys):
    out = tmp_path / "solve.json"
    assert main(["solve", THREE, "--pretty", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    text = out.read_text()
    assert text.startswith("{\n  ") and json.loads(text)["size"] == 3


def test_tests_file(tmp_path, capsys):
    f = tmp_path / "t.txt"
    f.write_text("000  # zero\n010\n\n111\n")
    assert main(["check", THREE, "--tests-file", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["complete"] is True


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.v"
    bad.write_text(".v a,b\nt2 a,q\n")
    assert main(["parse", str(bad)]) == 3
    assert main(["parse", str(tmp_path / "missing.v")]) == 3
    assert main(["check", THREE, "--tests-file", str(tmp_path / "missing.txt")]) == 3
    assert main(["check", THREE, "--tests", "0000"]) == 1
    assert main(["check", THREE]) == 1
    assert main(["compact", THREE, "--tests", "000"]) == 1
    assert main(["gen", THREE, "--strategy", "linear", "--model", "cell"]) == 1
    assert main(["decomp", THREE, "--max-wires", "1"]) == 1
    capsys.readouterr()
    with pytest.raises(SystemExit) as err:
        main(["solve"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["random", "--n", "4", "--length", "3"])
    assert err.value.code == 2


def test_run_report(capsys):
    rep = run(["solve", THREE, "--model", "cell"])
    capsys.readouterr()
    assert rep.verb == "solve" and rep.model == "cell" and rep.payload["size"] == 4
    assert rep.inputs["circuit"] == THREE
