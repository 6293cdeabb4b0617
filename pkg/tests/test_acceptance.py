"""Acceptance criteria, one test per criterion.

Run ``pytest tests/test_acceptance.py -v`` for the pass/fail lines in the
terminal summary, or ``python3 tests/test_acceptance.py`` to run them
directly.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import pytest

from cellspec import canonical_preorders
from cellspec.cli import main
from cellspec.serialize import (
    dumps,
    fposet_doc,
    fsp_doc,
    loads,
    parse_fposet,
    parse_fsp,
    parse_preorder,
    parse_product,
    parse_report,
    parse_space,
    preorder_doc,
    product_doc,
    report_doc,
    space_doc,
)
from cellspec.suites import run_suite

RESULTS: dict[int, tuple[str, str]] = {}


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS[number] = (title, "FAIL")
                raise
            RESULTS[number] = (title, "PASS")
        return run
    return wrap


def clean(name: str, max_seconds: float | None = None) -> None:
    result = run_suite(name)
    assert result.instances > 0
    assert result.violations == [], result.violations[:3]
    if max_seconds is not None:
        assert result.wall_time <= max_seconds, f"{name} took {result.wall_time:.1f}s"


@criterion(1, "tech1 suite over canonical preorders of size <= 4")
def test_criterion_01_tech1():
    # 46 classes; criterion 10 ties the count to the labelled brute force
    assert len(canonical_preorders(4)) == 46
    clean("tech1", max_seconds=300)


@criterion(2, "t-family suite")
def test_criterion_02_t_family():
    clean("t-family")


@criterion(3, "witness-family suite over P, Q of size <= 3")
def test_criterion_03_witness_family():
    clean("witness-family")


@criterion(4, "char-false implies oracle-false at N = |F(A)|")
def test_criterion_04_direction(tmp_path):
    out = tmp_path / "agreement.json"
    assert main(["verify", "agreement-experiment", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["violations"] == []
    assert len(report["table"]) == 46 * 4
    negatives = [r for r in report["table"] if r["char"] is False]
    assert negatives and all(r["fa_size"] for r in negatives)
    # the converse is data, not a requirement
    assert report["converse_discrepancies"] == [r for r in report["table"] if not r["agree"]]
    print(f"agreement report: {len(report['converse_discrepancies'])} converse discrepancies "
          f"out of {len(report['table'])} (P, k) pairs at test bound {report['meta']['caps']['test-bound']}")


@criterion(5, "tech2 suite")
def test_criterion_05_tech2():
    clean("tech2")


@criterion(6, "projection pullback suite")
def test_criterion_06_pullback():
    clean("proj-pullback")


@criterion(7, "finite density bound on F(A)")
def test_criterion_07_denspec():
    clean("denspec-finite")


@criterion(8, "invariant chain on size <= 5 plus 1000 random of size <= 8")
def test_criterion_08_invariant_chain():
    result = run_suite("invariant-chain")
    assert result.instances == len(canonical_preorders(5)) + 1000
    assert result.violations == []
    assert result.wall_time <= 600


@criterion(9, "topology bridge")
def test_criterion_09_topology():
    clean("alexandrov")


@criterion(10, "enumeration self-consistency")
def test_criterion_10_enumeration():
    result = run_suite("enumeration")
    assert result.violations == []
    assert result.extra["labeled_count_3"] == 29
    assert result.extra["counts"] == {"1": 1, "2": 3, "3": 9, "4": 33}


@criterion(11, "branch and bound against brute force")
def test_criterion_11_solver():
    result = run_suite("solver")
    assert result.instances == len(canonical_preorders(6)) + 500
    assert result.violations == []


def _cli_out(tmp_path: Path, name: str, *argv: str) -> str:
    path = tmp_path / name
    assert main([*argv, "--out", str(path)]) == 0
    return path.read_text()


def _write(tmp_path: Path, name: str, doc: dict) -> str:
    path = tmp_path / name
    path.write_text(dumps(doc))
    return str(path)


@criterion(12, "CLI round-trips and --jobs determinism")
def test_criterion_12_cli(tmp_path):
    flat3 = _write(tmp_path, "flat3.json", {"size": 3, "leq": [], "closed": False})
    chain2 = _write(tmp_path, "chain2.json", {"size": 2, "leq": [[0, 1]], "closed": False})
    vee = _write(tmp_path, "vee.json", {"size": 3, "leq": [[2, 0], [2, 1]], "closed": False})

    structures = {
        "fa": (_cli_out(tmp_path, "fa.json", "construct", "fa", "--input", flat3, "--family", "[[0,1],[1,2]]"),
               parse_fposet, fposet_doc),
        "product": (_cli_out(tmp_path, "prod.json", "construct", "product", "--input", chain2, "--input", vee),
                    parse_product, product_doc),
        "fsp": (_cli_out(tmp_path, "fsp.json", "construct", "fsp", "--input", chain2, "--input", chain2),
                parse_fsp, fsp_doc),
        "alexandrov": (_cli_out(tmp_path, "alex.json", "construct", "alexandrov", "--input", vee),
                       parse_space, space_doc),
        "openposet": (_cli_out(tmp_path, "open.json", "construct", "openposet", "--input", str(tmp_path / "alex.json")),
                      parse_preorder, preorder_doc),
    }
    for kind, (text, parse, to_doc) in structures.items():
        assert dumps(to_doc(parse(loads(text)))) == text, kind

    for line in _cli_out(tmp_path, "enum.jsonl", "enumerate", "--max-size", "4").splitlines(keepends=True):
        assert dumps(preorder_doc(parse_preorder(loads(line)))) == line

    for mode, bound in (("char", "1"), ("oracle", "3")):
        text = _cli_out(tmp_path, f"spec-{mode}.json", "spectrum", "--input", vee, "--kmax", "3",
                        "--mode", mode, "--test-bound", bound)
        doc = loads(text)
        assert dumps(doc) == text
        P = parse_preorder(doc["input"])
        for r in doc["reports"]:
            assert report_doc(P, parse_report(r)) == r

    for argv in (["analyze", "--input", vee], ["verify", "witness-family"]):
        text = _cli_out(tmp_path, "x.json", *argv)
        assert dumps(loads(text)) == text

    runs = {}
    for jobs in ("1", "8"):
        runs[jobs] = (
            _cli_out(tmp_path, f"v{jobs}.json", "verify", "agreement-experiment", "--caps", "size=3", "--jobs", jobs),
            _cli_out(tmp_path, f"w{jobs}.json", "verify", "witness-family", "--jobs", jobs),
            _cli_out(tmp_path, f"s{jobs}.json", "spectrum", "--input", flat3, "--kmax", "4",
                     "--mode", "oracle", "--test-bound", "3", "--jobs", jobs),
        )
    assert runs["1"] == runs["8"]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
