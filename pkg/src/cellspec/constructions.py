"""Derived structures: products, finite-support products, F(A) posets and
the antichain transfers between them."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .clique import bits
from .errors import (
    EmptyPoset,
    NoTopElement,
    NotAFamily,
    NotAnAntichain,
    NotSurjective,
    PreconditionUnmet,
    SetNotInFPoset,
    SizeOverflow,
)
from .order import MonotoneMap, Preorder, is_antichain

DEFAULT_CAP = 4096


def _sort_key(mask: int) -> list[int]:
    return bits(mask)


def _normalize(masks: Iterable[int]) -> tuple[int, ...]:
    unique = set(masks)
    kept = [m for m in unique if not any(m != o and m & o == m for o in unique)]
    return tuple(sorted(kept, key=_sort_key))


@dataclass(frozen=True)
class AntichainFamily:
    """A family of antichains of ``base``; members are bitmasks over the base.

    Members are kept normalized: no member is a subset of another.
    Build with :meth:`from_members` to normalize raw input.
    """

    base: Preorder
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        full = (1 << self.base.size) - 1
        for m in self.members:
            if m & ~full:
                raise NotAFamily(f"member {bits(m)} leaves the base carrier")
            if not is_antichain(self.base, bits(m)):
                raise NotAFamily(f"member {bits(m)} is not an antichain")
        if _normalize(self.members) != self.members:
            raise NotAFamily("members are not normalized (sorted, no member inside another)")

    @classmethod
    def from_members(cls, base: Preorder, members: Iterable[Iterable[int]]) -> "AntichainFamily":
        return cls(base, _normalize(base.mask(m) for m in members))

    @cached_property
    def union(self) -> int:
        u = 0
        for m in self.members:
            u |= m
        return u

    @property
    def union_size(self) -> int:
        return self.union.bit_count()

    def is_k_large(self, k: int) -> bool:
        return self.union_size >= k + 1

    def member_lists(self) -> list[list[int]]:
        return [bits(m) for m in self.members]


def _submasks(mask: int) -> list[int]:
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            return out
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class FPoset:
    """All subsets of members of ``family`` under reverse inclusion.

    ``sets`` are base bitmasks ordered by their sorted index lists, so the
    empty set comes first and is the top element of :attr:`as_preorder`.
    """

    family: AntichainFamily
    sets: tuple[int, ...]

    @cached_property
    def index(self) -> dict[int, int]:
        return {s: i for i, s in enumerate(self.sets)}

    @cached_property
    def as_preorder(self) -> Preorder:
        sets = self.sets
        down = []
        for s in sets:
            m = 0
            for j, t in enumerate(sets):
                if t & s == s:  # t contains s, so t <= s
                    m |= 1 << j
            down.append(m)
        return Preorder(len(sets), tuple(down))

    @property
    def size(self) -> int:
        return len(self.sets)

    def contains(self, mask: int) -> bool:
        return mask in self.index

    def position(self, members: Iterable[int]) -> int:
        mask = self.family.base.mask(members)
        if mask not in self.index:
            raise SetNotInFPoset(f"{bits(mask)} is not a subset of any family member")
        return self.index[mask]

    def set_lists(self) -> list[list[int]]:
        return [bits(s) for s in self.sets]


def product(P: Preorder, Q: Preorder, cap: int = DEFAULT_CAP) -> Preorder:
    """Coordinate-wise product; pair ``(p, q)`` has index ``p * Q.size + q``."""
    if P.size == 0 or Q.size == 0:
        raise EmptyPoset("product factors must be nonempty")
    size = P.size * Q.size
    if size > cap:
        raise SizeOverflow(f"product has {size} elements, cap is {cap}")
    return _build_product(P, Q)


@lru_cache(maxsize=4096)
def _build_product(P: Preorder, Q: Preorder) -> Preorder:
    m = Q.size
    down = []
    for p in range(P.size):
        lower_p = bits(P.down[p])
        for q in range(m):
            dq = Q.down[q]
            down.append(sum(dq << (pp * m) for pp in lower_p))
    return Preorder(P.size * m, tuple(down))


def pair(Q_size: int, p: int, q: int) -> int:
    return p * Q_size + q


def unpair(Q_size: int, idx: int) -> tuple[int, int]:
    return divmod(idx, Q_size)


@dataclass(frozen=True)
class PointedPreorder:
    order: Preorder
    top: int

    def __post_init__(self) -> None:
        self.order.check_index(self.top)
        if self.order.down[self.top] != (1 << self.order.size) - 1:
            raise NoTopElement(f"element {self.top} is not above every element")

    @classmethod
    def infer(cls, order: Preorder) -> "PointedPreorder":
        """Pointed at the lowest-index greatest element."""
        full = (1 << order.size) - 1
        for i, d in enumerate(order.down):
            if d == full:
                return cls(order, i)
        raise NoTopElement("preorder has no greatest element")


@dataclass(frozen=True)
class FiniteSupportProduct:
    order: Preorder
    shape: tuple[int, ...]
    tops: tuple[int, ...]
    supports: tuple[tuple[int, ...], ...]

    def coordinates(self, idx: int) -> tuple[int, ...]:
        coords = []
        for s in reversed(self.shape):
            idx, c = divmod(idx, s)
            coords.append(c)
        return tuple(reversed(coords))


def finite_support_product(factors: Sequence[PointedPreorder], cap: int = DEFAULT_CAP) -> FiniteSupportProduct:
    """Finite-support product over a finite index set.

    With finitely many factors every tuple has finite support, so the
    carrier is the full coordinate-wise product (first factor most
    significant). The support of each tuple is recorded alongside.
    """
    if not factors:
        raise EmptyPoset("finite-support product needs at least one factor")
    for f in factors:
        PointedPreorder(f.order, f.top)  # revalidate in case of a hand-built instance
    shape = tuple(f.order.size for f in factors)
    total = 1
    for s in shape:
        total *= s
    if total > cap:
        raise SizeOverflow(f"product has {total} elements, cap is {cap}")
    order = factors[0].order
    for f in factors[1:]:
        order = product(order, f.order, cap=cap)
    result = FiniteSupportProduct(order, shape, tuple(f.top for f in factors), ())
    supports = tuple(
        tuple(i for i, c in enumerate(result.coordinates(idx)) if c != factors[i].top)
        for idx in range(total)
    )
    return FiniteSupportProduct(order, shape, result.tops, supports)


def f_poset(family: AntichainFamily, cap: int = DEFAULT_CAP) -> FPoset:
    if not family.members:
        raise NotAFamily("F(A) needs a nonempty family")
    widest = max(m.bit_count() for m in family.members)
    if 1 << widest > cap:
        raise SizeOverflow(f"a member with {widest} elements alone exceeds the cap of {cap} sets")
    found: set[int] = set()
    for m in family.members:
        found.update(_submasks(m))
    if len(found) > cap:
        raise SizeOverflow(f"F(A) has {len(found)} sets, cap is {cap}")
    return FPoset(family, tuple(sorted(found, key=_sort_key)))


def lemma_tech1_check(fp: FPoset, F: Iterable[int], G: Iterable[int]) -> bool:
    """Order-theoretic incompatibility of F, G agrees with ``F | G`` missing from F(A)."""
    i, j = fp.position(F), fp.position(G)
    P = fp.as_preorder
    incompatible = not (P.down[i] & P.down[j])
    union_missing = not fp.contains(fp.sets[i] | fp.sets[j])
    return incompatible == union_missing


@dataclass(frozen=True)
class TFamily:
    product: Preorder
    fposet: FPoset
    members: tuple[int, ...]  # indices into ``product``
    verified: bool


def t_family(family: AntichainFamily, cap: int = DEFAULT_CAP) -> TFamily:
    """Pairs ``(p, {p})`` for ``p`` in the union, inside base x F(A)."""
    fp = f_poset(family, cap=cap)
    prod = product(family.base, fp.as_preorder, cap=cap)
    members = tuple(
        pair(fp.size, p, fp.index[1 << p]) for p in bits(family.union)
    )
    return TFamily(prod, fp, members, is_antichain(prod, members))


def witness_family(P: Preorder, Q: Preorder, W: Iterable[int]) -> AntichainFamily:
    """The family ``A_r = {p : (p, q) in W for some q >= r}``, ``r`` ranging over Q.

    Empty ``A_r`` are dropped, so an empty ``W`` yields an empty family.
    """
    prod = product(P, Q, cap=max(DEFAULT_CAP, P.size * Q.size))
    W = sorted(set(W))
    if not is_antichain(prod, W):
        raise NotAnAntichain("W is not an antichain of P x Q")
    # first-coordinate mask of W points above each q
    pts = [unpair(Q.size, w) for w in W]
    raw = []
    for r in range(Q.size):
        above = Q.up[r]
        a = 0
        for p, q in pts:
            if above >> q & 1:
                a |= 1 << p
        if a:
            if not is_antichain(P, bits(a)):
                raise AssertionError(f"A_{r} = {bits(a)} is not an antichain")
            raw.append(a)
    return AntichainFamily(P, _normalize(raw))


def is_monotone_surjection(m: MonotoneMap) -> bool:
    return is_monotone(m) and set(m.image) == set(range(m.target.size))


def is_monotone(m: MonotoneMap) -> bool:
    S, T, img = m.source, m.target, m.image
    return all(T.leq(img[a], img[b]) for b in range(S.size) for a in bits(S.down[b]))


def pullback_antichain(m: MonotoneMap, R: Preorder, W: Iterable[int]) -> tuple[int, ...]:
    """Lift an antichain of ``target x R`` to ``source x R`` along ``m``.

    Each ``(q, r)`` goes to ``(p, r)`` with ``p`` the least-index preimage
    of ``q``. A common lower bound ``(s, t)`` upstairs would map to one
    downstairs, so the lift is again an antichain, of the same size.
    """
    if not is_monotone(m):
        raise PreconditionUnmet("map is not monotone")
    preimage: dict[int, int] = {}
    for p, q in enumerate(m.image):
        preimage.setdefault(q, p)
    if len(preimage) != m.target.size:
        raise NotSurjective("map is not onto its target")
    W = sorted(set(W))
    down_prod = product(m.target, R, cap=max(DEFAULT_CAP, m.target.size * R.size))
    if not is_antichain(down_prod, W):
        raise NotAnAntichain("W is not an antichain of target x R")
    lifted = tuple(sorted(pair(R.size, preimage[q], r) for q, r in (unpair(R.size, w) for w in W)))
    up_prod = product(m.source, R, cap=max(DEFAULT_CAP, m.source.size * R.size))
    if len(lifted) != len(W) or not is_antichain(up_prod, lifted):
        raise AssertionError("pullback lost the antichain property")
    return lifted


def projection(P: Preorder, Q: Preorder, left: bool = True) -> MonotoneMap:
    """Projection of ``P x Q`` onto one factor."""
    prod = product(P, Q, cap=max(DEFAULT_CAP, P.size * Q.size))
    if left:
        image = tuple(i // Q.size for i in range(prod.size))
        return MonotoneMap(prod, P, image)
    image = tuple(i % Q.size for i in range(prod.size))
    return MonotoneMap(prod, Q, image)
