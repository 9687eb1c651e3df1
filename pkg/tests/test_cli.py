import json
import subprocess
import sys

import pytest

from dichotomy.cli import main
from dichotomy.structures import RelationTable, SimpleModel, load_structure, structure_to_dict


def write_model(path, n, pairs):
    path.write_text(json.dumps(structure_to_dict(SimpleModel.from_relation(n, RelationTable.of(2, pairs)))))
    return str(path)


@pytest.fixture
def succ8(tmp_path):
    return write_model(tmp_path / "succ8.json", 8, [(i, (i + 1) % 8) for i in range(8)])


@pytest.fixture
def eq9(tmp_path):
    return write_model(tmp_path / "eq9.json", 9, [(x, y) for x in range(9) for y in range(9) if x // 3 == y // 3])


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_decompose_auto(capsys, succ8):
    code, rep, _ = run(capsys, "decompose", "--in", succ8, "--auto")
    assert code == 0 and rep["verified"] and rep["result"]["stats"]["k"] == 1
    assert rep["tool"] == "dichotomy" and "schema" in rep


def test_decompose_failure_exit_1(capsys, eq9):
    code, rep, _ = run(capsys, "decompose", "--in", eq9, "--k", "1")
    assert code == 1 and rep["result"]["failure"] == "MajorityTie"
    code, rep, _ = run(capsys, "decompose", "--in", eq9, "--auto")
    assert code == 0 and rep["verified"]


def test_eval_irreflexive(capsys, succ8):
    code, rep, _ = run(capsys, "eval", "--in", succ8, "--formula", "E x. r(x,x)")
    assert code == 0 and rep["result"]["result"] is False


def test_input_errors(capsys, tmp_path, succ8):
    assert run(capsys, "probe", "--family", str(tmp_path / "missing.json"))[0] == 2
    code, _, err = run(capsys, "eval", "--in", succ8, "--formula", "E x. (r(x,x)")
    assert code == 2 and "error" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"universe": 3,\n "relations": [}')
    code, _, err = run(capsys, "eval", "--in", str(bad), "--formula", "x = x")
    assert code == 2 and "line 2" in err


def test_emit_flags(capsys, tmp_path, succ8):
    mpath, fpath = tmp_path / "m.json", tmp_path / "phi.txt"
    code, rep, _ = run(capsys, "decompose", "--in", succ8, "--auto", "--emit-model", str(mpath),
                       "--emit-formula", str(fpath))
    assert code == 0
    assert load_structure(mpath).model.size == 8
    assert fpath.read_text().strip() == rep["result"]["defining_formula"]


def test_sunflower_file_shapes(capsys, tmp_path):
    p = tmp_path / "seq.json"
    p.write_text(json.dumps({"n": 2, "tuples": [[1, 2], [1, 3], [1, 4], [1, 2], [5, 6]]}))
    code, rep, _ = run(capsys, "sunflower", "--in", str(p), "--m", "3")
    assert code == 0 and rep["result"]["extraction"]["indices"] == [0, 1, 2]
    assert rep["result"]["coding"]["verified"]
    p.write_text(json.dumps([[0], [1], [2], [3], [4]]))
    assert run(capsys, "sunflower", "--in", str(p), "--m", "3")[0] == 0
    p.write_text(json.dumps([[0], [1, 2]]))
    assert run(capsys, "sunflower", "--in", str(p), "--m", "1")[0] == 2


def test_census_exact_strings(capsys):
    code, rep, _ = run(capsys, "census", "--n", "1", "--m", "2")
    assert code == 0 and rep["result"]["arity_threshold"] == 3


def test_arith_and_config(capsys, tmp_path):
    code, rep, _ = run(capsys, "arith-search", "--n", "2", "--mutations")
    assert code == 0 and rep["verified"]
    order = write_model(tmp_path / "o.json", 5, [(i, j) for i in range(5) for j in range(5) if i < j])
    code, rep, _ = run(capsys, "config-search", "--in", order, "--formula", "(r(x,y) | x = y)")
    assert code == 0 and rep["result"]["length"] == 5


def test_probe_family(capsys, tmp_path):
    fam = tmp_path / "fam.json"
    fam.write_text(json.dumps({"generator": "balanced-equivalence", "sizes": [4, 9, 16], "lambda0": "sqrt"}))
    code, rep, _ = run(capsys, "probe", "--family", str(fam))
    assert code == 0 and rep["result"]["verdict"] == "growing"


def test_byte_identical_runs(tmp_path, succ8):
    cmd = [sys.executable, "-m", "dichotomy.cli", "analyze", "--in", succ8, "--k", "1"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_no_floats_in_reports(capsys, succ8):
    _, rep, _ = run(capsys, "analyze", "--in", succ8)

    def walk(v):
        assert not isinstance(v, float)
        if isinstance(v, dict):
            for x in v.values():
                walk(x)
        elif isinstance(v, list):
            for x in v:
                walk(x)
    walk(rep)
