import json

import pytest

from cellspec.cli import main, parse_caps, UsageError


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    return {
        "chain4": write(tmp_path, "chain4.json", {"size": 4, "leq": [[0, 1], [1, 2], [2, 3]], "closed": False}),
        "flat3": write(tmp_path, "flat3.json", {"size": 3, "leq": [], "closed": False}),
        "flat2": write(tmp_path, "flat2.json", {"size": 2, "leq": [], "closed": False}),
        "chain2": write(tmp_path, "chain2.json", {"size": 2, "leq": [[0, 1]], "closed": False}),
        "bottomed": write(tmp_path, "bottomed.json", {"size": 3, "leq": [[0, 1], [0, 2]], "closed": False}),
        "bad": write(tmp_path, "bad.json", {"size": 3, "leq": [[0, 0], [1, 1], [2, 2], [0, 1], [1, 2]], "closed": True}),
    }


def test_analyze_chain(capsys, files):
    code, out, _ = run(capsys, "analyze", "--input", files["chain4"])
    doc = json.loads(out)
    assert code == 0 and (doc["c"], doc["d"], doc["pc"]) == (1, 1, 1)
    assert doc["meta"]["tool"] == "cellspec" and "seed" in doc["meta"] and "caps" in doc["meta"]


def test_analyze_flat(capsys, files):
    doc = json.loads(run(capsys, "analyze", "--input", files["flat3"])[1])
    assert (doc["c"], doc["d"], doc["pc"]) == (3, 3, 3)


def test_malformed_relation(capsys, files):
    code, out, err = run(capsys, "analyze", "--input", files["bad"])
    assert code == 2 and out == "" and "RelationNotTransitive" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", "--input", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--mode", "maybe"])
    assert exc.value.code == 2


def test_spectrum_bottomed(capsys, files):
    doc = json.loads(run(capsys, "spectrum", "--input", files["bottomed"], "--kmax", "4")[1])
    assert doc["spectrum"] == [1, 2, 3, 4]


def test_spectrum_flat3_char(capsys, files):
    doc = json.loads(run(capsys, "spectrum", "--input", files["flat3"], "--kmax", "4", "--mode", "char")[1])
    assert doc["spectrum"] == [3, 4] and doc["pc"] == 3


def test_spectrum_flat2_oracle(capsys, files):
    doc = json.loads(run(capsys, "spectrum", "--input", files["flat2"], "--kmax", "1",
                         "--mode", "oracle", "--test-bound", "1")[1])
    assert doc["spectrum"] == [] and doc["test_bound"] == 1
    assert doc["reports"][0]["witness"]["test_poset"]["size"] == 1


def test_spectrum_caps(capsys, files):
    code, _, err = run(capsys, "spectrum", "--input", files["flat3"], "--caps", "widgets=3")
    assert code == 2 and "widgets" in err
    doc = json.loads(run(capsys, "spectrum", "--input", files["flat3"], "--caps", "families=1000,members=3")[1])
    assert doc["meta"]["caps"] == {"families": 1000, "members": 3}


def test_parse_caps():
    assert parse_caps("families=5, members=2") == {"families": 5, "members": 2}
    with pytest.raises(UsageError):
        parse_caps("families")
    with pytest.raises(UsageError):
        parse_caps("families=x")


def test_construct_fa(capsys, files):
    doc = json.loads(run(capsys, "construct", "fa", "--input", files["flat3"], "--family", "[[0,1],[1,2]]")[1])
    assert len(doc["sets"]) == 6


def test_construct_product(capsys, files):
    doc = json.loads(run(capsys, "construct", "product", "--input", files["chain2"], "--input", files["chain2"])[1])
    assert doc["size"] == 4 and doc["pairing"]["formula"] == "(p, q) -> p * 2 + q"


def test_construct_alexandrov_then_openposet(capsys, files, tmp_path):
    out = tmp_path / "space.json"
    assert main(["construct", "alexandrov", "--input", files["chain2"], "--out", str(out)]) == 0
    assert json.loads(out.read_text()) == {"opens": [[], [0], [0, 1]], "points": 2}
    doc = json.loads(run(capsys, "construct", "openposet", "--input", str(out))[1])
    assert doc["leq"] == [[0, 0], [0, 1], [1, 1]]


def test_construct_fsp_needs_top(capsys, files):
    code, _, err = run(capsys, "construct", "fsp", "--input", files["flat2"])
    assert code == 2 and "NoTopElement" in err


def test_construct_is_deterministic(capsys, files):
    argv = ["construct", "fsp", "--input", files["chain2"], "--input", files["chain2"]]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_verify_small(capsys):
    code, out, _ = run(capsys, "verify", "tech1", "--caps", "size=3")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["violations"] == [] and doc["instances"] > 0


def test_verify_unknown_cap(capsys):
    code, _, err = run(capsys, "verify", "tech1", "--caps", "depth=2")
    assert code == 2 and "depth" in err


def test_verify_violation_exit(capsys, monkeypatch):
    from cellspec import suites

    def broken(task):
        return 1, [{"task": "forced"}]

    monkeypatch.setitem(suites.SUITES, "tech1", suites.SUITES["tech1"].__class__(
        "tech1", "forced", {"size": 1, "members": 1}, suites._tasks_grid, broken))
    code, out, _ = run(capsys, "verify", "tech1")
    assert code == 1 and json.loads(out)["violations"] == [{"task": "forced"}]


def test_enumerate(capsys):
    lines = run(capsys, "enumerate", "--max-size", "3")[1].splitlines()
    assert len(lines) == 13
    lines = run(capsys, "enumerate", "--random", "5", "--size", "2-4", "--seed", "3")[1].splitlines()
    assert [json.loads(x)["size"] for x in lines] == [2, 3, 4, 2, 3]
