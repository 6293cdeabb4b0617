"""``cellspec`` command line: analyze, spectrum, verify, construct, enumerate.

Exit status is 0 on success, 1 when a suite or invariant check finds
violations, and 2 on usage or validation errors.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .constructions import AntichainFamily, PointedPreorder, f_poset, finite_support_product, product
from .errors import CellspecError, FormatError
from .generators import enumerate_preorders, random_stream
from .serialize import (
    ProductCarrier,
    dumps,
    fposet_doc,
    fsp_doc,
    loads,
    parse_preorder,
    parse_space,
    preorder_doc,
    product_doc,
    report_doc,
    space_doc,
)
from .spectrum import SpectrumQuery, char_k, invariant_chain_report, rel_spectrum_member
from .suites import DEFAULT_SEED, SUITES, run_suite
from .topology import alexandrov_space, open_poset

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_caps(text: str | None) -> dict[str, int]:
    """``"families=100,members=3"`` to a dict; empty input gives ``{}``."""
    caps: dict[str, int] = {}
    if not text:
        return caps
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"cap {item!r} is not of the form name=INT")
        try:
            caps[key.strip()] = int(value)
        except ValueError:
            raise UsageError(f"cap {key.strip()!r} needs an integer, got {value!r}") from None
    return caps


def _meta(args: argparse.Namespace, caps: dict[str, Any]) -> dict:
    return {"tool": "cellspec", "version": __version__, "seed": args.seed, "caps": caps}


def _read_doc(path: str) -> Any:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def _inputs(args: argparse.Namespace, count: int | None = None) -> list[Any]:
    paths = args.input or []
    if not paths or (count is not None and len(paths) != count):
        want = f"exactly {count}" if count else "at least one"
        raise UsageError(f"{args.command} needs {want} --input file(s), got {len(paths)}")
    return [_read_doc(p) for p in paths]


def _spectrum_query(args: argparse.Namespace, caps: dict[str, int]) -> SpectrumQuery:
    unknown = set(caps) - {"families", "members"}
    if unknown:
        raise UsageError(f"unknown cap(s) {', '.join(sorted(unknown))}; use families=F,members=M")
    return SpectrumQuery(1, args.test_bound, caps.get("families"), caps.get("members"))


# commands -------------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace) -> tuple[dict, int]:
    caps = parse_caps(args.caps)
    q = _spectrum_query(args, caps)
    P = parse_preorder(_inputs(args, 1)[0])
    rep = invariant_chain_report(P, args.nmax, q)
    doc = {
        "meta": _meta(args, caps),
        "input": preorder_doc(P),
        "c": rep.c,
        "c_witness": rep.c_witness,
        "d": rep.d,
        "d_witness": rep.d_witness,
        "ind": {str(n): v for n, v in rep.ind.items()},
        "ind_witness": {str(n): w for n, w in rep.ind_witness.items()},
        "pc": rep.fin_pc,
        "spectrum": rep.spectrum,
        "violations": rep.violations,
    }
    return doc, EXIT_VIOLATIONS if rep.violations else EXIT_OK


def _spectrum_job(job: tuple) -> dict:
    P, q, mode, timing = job
    r = char_k(P, q) if mode == "char" else rel_spectrum_member(P, q)
    return report_doc(P, r, timing)


def cmd_spectrum(args: argparse.Namespace) -> tuple[dict, int]:
    caps = parse_caps(args.caps)
    q = _spectrum_query(args, caps)
    if args.kmax < 1:
        raise UsageError("--kmax must be at least 1")
    P = parse_preorder(_inputs(args, 1)[0])
    if args.mode == "oracle":
        enumerate_preorders(args.test_bound)  # fail fast on an unsupported bound
    jobs = [(P, q.with_k(k), args.mode, args.timing) for k in range(1, args.kmax + 1)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_spectrum_job, jobs))
    else:
        reports = [_spectrum_job(j) for j in jobs]
    members = [r["k"] for r in reports if r["verdict"] is True]
    doc = {
        "meta": _meta(args, caps),
        "input": preorder_doc(P),
        "mode": args.mode,
        "kmax": args.kmax,
        "spectrum": members,
        "pc": min(members) if members else None,
        "undecided": [r["k"] for r in reports if r["verdict"] == "exhausted-caps"],
        "reports": reports,
    }
    if args.mode == "oracle":
        doc["test_bound"] = args.test_bound
    return doc, EXIT_OK


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    caps = parse_caps(args.caps)
    try:
        result = run_suite(args.suite, caps, args.seed, args.jobs)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    doc = {
        "meta": _meta(args, result.caps),
        "suite": result.suite,
        "instances": result.instances,
        "violations": result.violations,
        "ok": result.ok,
    }
    doc.update(result.extra)
    if args.timing:
        doc["wall_time"] = round(result.wall_time, 3)
    return doc, EXIT_OK if result.ok else EXIT_VIOLATIONS


def _pointed(doc: Any) -> PointedPreorder:
    P = parse_preorder(doc)
    if "top" in doc:
        top = doc["top"]
        if not isinstance(top, int) or isinstance(top, bool):
            raise FormatError("field 'top' must be an integer")
        return PointedPreorder(P, top)
    return PointedPreorder.infer(P)


def cmd_construct(args: argparse.Namespace) -> tuple[dict, int]:
    kind = args.kind
    if kind == "fa":
        P = parse_preorder(_inputs(args, 1)[0])
        if args.family is None:
            raise UsageError("construct fa needs --family, a JSON list of index lists")
        members = loads(args.family)
        if not isinstance(members, list) or not all(isinstance(m, list) for m in members):
            raise FormatError("--family must be a JSON list of index lists")
        doc = fposet_doc(f_poset(AntichainFamily.from_members(P, members)))
    elif kind == "product":
        P, Q = (parse_preorder(d) for d in _inputs(args, 2))
        doc = product_doc(ProductCarrier(product(P, Q), P.size, Q.size))
    elif kind == "fsp":
        doc = fsp_doc(finite_support_product([_pointed(d) for d in _inputs(args)]))
    elif kind == "alexandrov":
        doc = space_doc(alexandrov_space(parse_preorder(_inputs(args, 1)[0])))
    else:
        doc = preorder_doc(open_poset(parse_space(_inputs(args, 1)[0])))
    return doc, EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> tuple[list[dict], int]:
    if args.random is not None:
        lo, _, hi = args.size.partition("-")
        try:
            size: int | tuple[int, int] = (int(lo), int(hi)) if hi else int(lo)
        except ValueError:
            raise UsageError(f"--size must be N or LO-HI, got {args.size!r}") from None
        stream = random_stream(args.random, size, args.edge_bias, args.seed)
    else:
        stream = enumerate_preorders(args.max_size)
    return [preorder_doc(P) for P in stream], EXIT_OK


# plumbing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cellspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cellspec {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", metavar="FILE", help="instance file; '-' reads stdin")
    common.add_argument("--out", metavar="FILE", help="write the JSON result here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--caps", metavar="K=V,...", help="search caps, e.g. families=1000,members=3")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--timing", action="store_true", help="include wall-clock fields (non-deterministic)")
    common.add_argument("--test-bound", type=int, default=1, metavar="N", help="largest test poset in oracle mode")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="c, d, ind_n, finite pc and the chain checks")
    p.add_argument("--nmax", type=int, default=4)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("spectrum", parents=[common], help="spectrum membership for k = 1..kmax")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--mode", choices=("char", "oracle"), default="char")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[common], help="build a derived structure")
    p.add_argument("kind", choices=("fa", "product", "fsp", "alexandrov", "openposet"))
    p.add_argument("--family", metavar="JSON", help="antichain family for 'fa', e.g. '[[0,1],[1,2]]'")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("enumerate", parents=[common], help="emit preorders as JSON lines")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--random", type=int, metavar="COUNT", help="seeded random instances instead")
    p.add_argument("--size", default="1-8", help="random sizes, N or LO-HI")
    p.add_argument("--edge-bias", type=float, default=0.3)
    p.set_defaults(func=cmd_enumerate)
    return parser


def _emit(result: dict | list[dict], out: str | None) -> None:
    if isinstance(result, list):
        text = "".join(dumps(d) for d in result)
    else:
        text = dumps(result)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        result, code = args.func(args)
        _emit(result, args.out)
    except (CellspecError, UsageError, ValueError) as exc:
        print(f"cellspec: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cellspec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
