"""JSON forms of every emitted structure.

All documents are written by :func:`dumps` (sorted keys, compact, trailing
newline), so ``dumps(parse(text)) == text`` for anything this module wrote.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .constructions import AntichainFamily, FiniteSupportProduct, FPoset, PointedPreorder, f_poset, product
from .errors import FormatError
from .order import Preorder
from .spectrum import FamilyWitness, ProductWitness, SpectrumReport
from .topology import FiniteSpace


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None


def _require(doc: Any, key: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise FormatError(f"field {key!r} has the wrong type")
    return value


def _index_lists(value: Any, what: str) -> list[list[int]]:
    if not isinstance(value, list) or not all(
        isinstance(x, list) and all(isinstance(i, int) and not isinstance(i, bool) for i in x) for x in value
    ):
        raise FormatError(f"{what} must be a list of integer lists")
    return value


# preorders ------------------------------------------------------------------

def preorder_doc(P: Preorder) -> dict:
    return {"size": P.size, "leq": [list(p) for p in P.pairs()], "closed": True}


def parse_preorder(doc: Any) -> Preorder:
    """``closed: true`` means the relation is verified as given; ``false`` closes it."""
    size = _require(doc, "size", int)
    pairs = _index_lists(_require(doc, "leq", list), "leq")
    closed = _require(doc, "closed", bool)
    if any(len(p) != 2 for p in pairs):
        raise FormatError("leq entries must be pairs")
    return Preorder.from_pairs(size, pairs, auto_close=not closed)


@dataclass(frozen=True)
class ProductCarrier:
    order: Preorder
    left_size: int
    right_size: int


def _pairing(right_size: int) -> str:
    return f"(p, q) -> p * {right_size} + q"


def product_doc(c: ProductCarrier) -> dict:
    doc = preorder_doc(c.order)
    doc["pairing"] = {"formula": _pairing(c.right_size), "left_size": c.left_size, "right_size": c.right_size}
    return doc


def parse_product(doc: Any) -> ProductCarrier:
    order = parse_preorder(doc)
    pairing = _require(doc, "pairing", dict)
    left = _require(pairing, "left_size", int)
    right = _require(pairing, "right_size", int)
    if left * right != order.size or pairing.get("formula") != _pairing(right):
        raise FormatError("pairing header does not match the carrier")
    return ProductCarrier(order, left, right)


def fsp_doc(f: FiniteSupportProduct) -> dict:
    doc = preorder_doc(f.order)
    doc["shape"] = list(f.shape)
    doc["tops"] = list(f.tops)
    doc["supports"] = [list(s) for s in f.supports]
    doc["pairing"] = {"formula": "mixed radix, first factor most significant"}
    return doc


def parse_fsp(doc: Any) -> FiniteSupportProduct:
    order = parse_preorder(doc)
    shape = tuple(_require(doc, "shape", list))
    tops = tuple(_require(doc, "tops", list))
    supports = tuple(tuple(s) for s in _index_lists(_require(doc, "supports", list), "supports"))
    f = FiniteSupportProduct(order, shape, tops, supports)
    expect = [tuple(i for i, c in enumerate(f.coordinates(x)) if c != tops[i]) for x in range(order.size)]
    if list(supports) != expect:
        raise FormatError("supports do not match coordinates and tops")
    return f


# families and F(A) ----------------------------------------------------------

def family_doc(fam: AntichainFamily) -> dict:
    return {"base": preorder_doc(fam.base), "members": fam.member_lists()}


def parse_family(doc: Any) -> AntichainFamily:
    base = parse_preorder(_require(doc, "base", dict))
    members = _index_lists(_require(doc, "members", list), "members")
    fam = AntichainFamily.from_members(base, members)
    if fam.member_lists() != members:
        raise FormatError("family members are not normalized and sorted")
    return fam


def fposet_doc(fp: FPoset) -> dict:
    return {
        "base": preorder_doc(fp.family.base),
        "family": fp.family.member_lists(),
        "sets": fp.set_lists(),
        "leq": [list(p) for p in fp.as_preorder.pairs()],
    }


def parse_fposet(doc: Any) -> FPoset:
    base = parse_preorder(_require(doc, "base", dict))
    members = _index_lists(_require(doc, "family", list), "family")
    fp = f_poset(AntichainFamily.from_members(base, members))
    if fp.set_lists() != _require(doc, "sets", list):
        raise FormatError("sets do not match the family")
    if [list(p) for p in fp.as_preorder.pairs()] != _require(doc, "leq", list):
        raise FormatError("leq does not match reverse inclusion on the sets")
    return fp


# spaces ---------------------------------------------------------------------

def space_doc(X: FiniteSpace) -> dict:
    return {"points": X.points, "opens": X.open_lists()}


def parse_space(doc: Any) -> FiniteSpace:
    points = _require(doc, "points", int)
    opens = _index_lists(_require(doc, "opens", list), "opens")
    masks = []
    for U in opens:
        if any(not 0 <= i < points for i in U):
            raise FormatError(f"open {U} leaves the point set")
        masks.append(sum(1 << i for i in U))
    return FiniteSpace(points, tuple(sorted(set(masks))))


def pointed_doc(P: PointedPreorder) -> dict:
    doc = preorder_doc(P.order)
    doc["top"] = P.top
    return doc


# reports --------------------------------------------------------------------

def witness_doc(P: Preorder, w: FamilyWitness | ProductWitness | None) -> dict | None:
    if w is None:
        return None
    if isinstance(w, FamilyWitness):
        return {
            "kind": "family",
            "family": family_doc(w.family),
            "fposet": fposet_doc(f_poset(w.family)),
            "fposet_cellularity": w.fposet_cellularity,
            "fposet_antichain": list(w.fposet_antichain),
        }
    prod = ProductCarrier(product(P, w.test_poset), P.size, w.test_poset.size)
    return {
        "kind": "test-poset",
        "test_poset": preorder_doc(w.test_poset),
        "test_cellularity": w.test_cellularity,
        "product": product_doc(prod),
        "antichain": list(w.antichain),
    }


def parse_witness(doc: Any) -> FamilyWitness | ProductWitness | None:
    if doc is None:
        return None
    kind = _require(doc, "kind", str)
    if kind == "family":
        fam = parse_family(_require(doc, "family", dict))
        parse_fposet(_require(doc, "fposet", dict))
        return FamilyWitness(fam, _require(doc, "fposet_cellularity", int), tuple(_require(doc, "fposet_antichain", list)))
    if kind == "test-poset":
        Q = parse_preorder(_require(doc, "test_poset", dict))
        parse_product(_require(doc, "product", dict))
        return ProductWitness(Q, _require(doc, "test_cellularity", int), tuple(_require(doc, "antichain", list)))
    raise FormatError(f"unknown witness kind {kind!r}")


def report_doc(P: Preorder, r: SpectrumReport, timing: bool = False) -> dict:
    stats: dict[str, Any] = {"nodes": r.nodes}
    if timing:
        stats["millis"] = round(r.millis, 3)
    doc = {
        "k": r.k,
        "mode": r.mode,
        "verdict": r.verdict,
        "witness": witness_doc(P, r.witness),
        "stats": stats,
    }
    if r.test_bound is not None:
        doc["test_bound"] = r.test_bound
    return doc


def parse_report(doc: Any) -> SpectrumReport:
    verdict = doc.get("verdict") if isinstance(doc, dict) else None
    if verdict not in (True, False, "exhausted-caps"):
        raise FormatError("verdict must be true, false or \"exhausted-caps\"")
    stats = _require(doc, "stats", dict)
    return SpectrumReport(
        verdict,
        _require(doc, "k", int),
        _require(doc, "mode", str),
        parse_witness(doc.get("witness")),
        _require(stats, "nodes", int),
        float(stats.get("millis", 0.0)),
        doc.get("test_bound"),
    )
