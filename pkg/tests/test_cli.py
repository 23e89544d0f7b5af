import json

import pytest

from cayleytri.cli import main
from cayleytri.io import digest, dumps, system_doc, system_from_doc, triangulation_doc, triangulation_from_doc

from conftest import EXAMPLE

SYSTEM = json.dumps({"n": 4, "d": 3, "perms": EXAMPLE})


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_documents_round_trip(example_system, example_triangulation):
    assert system_from_doc(system_doc(example_system)) == example_system
    assert triangulation_from_doc(triangulation_doc(example_triangulation)) == example_triangulation


def test_dumps_is_stable():
    assert dumps({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert digest({"a": 1}) == digest({"a": 1})


def test_check_acyclic(capsys):
    code, out, _ = run(capsys, "check-acyclic", SYSTEM)
    assert code == 0 and json.loads(out) == {"acyclic": True}
    cyc = '{"n":2,"d":3,"perms":{"AB":"12","BC":"12","AC":"21"}}'
    code, out, _ = run(capsys, "check-acyclic", cyc)
    assert json.loads(out)["witness"] == {"symbols": [1, 2], "columns": "ABC"}


def test_dual_and_positions(capsys):
    _, out, _ = run(capsys, "dual", SYSTEM)
    labels = json.loads(out)["labels"]
    assert [labels[k] for k in ("12", "13", "14")] == ["CAB", "ACB", "CAB"]
    _, out, _ = run(capsys, "positions", SYSTEM)
    assert json.loads(out)["positions"] == [[1, 0, 2], [1, 1, 1], [0, 2, 1], [0, 3, 0]]


def test_staircase_and_extract(capsys, tmp_path):
    _, out, _ = run(capsys, "staircase", "--perm", "231", "--cols", "AB")
    path = tmp_path / "t.json"
    path.write_text(out)
    _, out, _ = run(capsys, "extract", str(path))
    assert json.loads(out)["system"]["perms"] == {"AB": [2, 3, 1]}


def test_solve_count(capsys):
    code, out, _ = run(capsys, "solve", "--shape", "4,2", "--mode", "count")
    assert code == 0 and json.loads(out)["count"] == 24


def test_unsat_is_exit_zero(capsys):
    # two rows that both want the whole triangle cannot coexist
    code, out, _ = run(capsys, "solve", "--shape", "2,2", "--positions", "[[0,1],[0,1]]")
    assert code == 0 and json.loads(out)["verdict"] == "UNSAT"


def test_spread_out_text(capsys):
    code, out, _ = run(capsys, "spread-out", "[[0,2,0],[2,0,0],[0,0,2]]", "--format", "text")
    assert code == 0 and "spread_out: True" in out


def test_realize(capsys):
    code, out, _ = run(capsys, "realize", '{"positions": [[1,0,2],[1,1,1],[0,2,1],[0,3,0]]}')
    assert code == 0 and json.loads(out)["verdict"] == "SAT"


def test_boundary_and_skeleton(capsys):
    _, out, _ = run(capsys, "boundary", '{"n":2,"d":2,"perms":{"AB":"12"}}')
    assert json.loads(out)["count"] == 1
    _, out, _ = run(capsys, "skeleton", SYSTEM, "--level", "3")
    doc = json.loads(out)
    assert all(doc["flags"].values()) and doc["extension"]["ok"]


@pytest.mark.parametrize("argv", [
    ["dual", '{"n":2,"d":3,"perms":{"AB":"12","BC":"12","AC":"21"}}'],
    ["positions", "{not json"],
    ["spread-out", "/no/such/file.json"],
    ["solve", "--shape", "three"],
    ["positions", '{"n":2,"d":2,"perms":{"AB":"13"}}'],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_unknown_stage_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "s99"])
    assert exc.value.code == 2


def test_consistency_failure_exit_3(capsys, monkeypatch):
    from cayleytri import cli
    from cayleytri.errors import ConsistencyError

    def boom(args):
        raise ConsistencyError("oracle disagrees")

    monkeypatch.setattr(cli, "cmd_positions", boom)
    code, _, err = run(capsys, "positions", SYSTEM)
    assert code == 3 and "oracle disagrees" in err
