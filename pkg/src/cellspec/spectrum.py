"""Finite cellular spectrum: the family characterization, the bounded
product oracle, and the invariant chain.

``k`` plays the role of the cardinal; "k-large" means ``|union| >= k + 1``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Literal, Union

from .clique import all_cliques, bits, max_clique, maximal_cliques
from .constructions import (
    AntichainFamily,
    f_poset,
    product,
    projection,
    pullback_antichain,
    t_family,
)
from .errors import BadArity, EmptyPoset, PreconditionUnmet
from .generators import InstanceStream, enumerate_preorders
from .order import (
    Preorder,
    cellularity,
    cellularity_exceeds,
    density,
    is_antichain,
    is_n_linked,
    linked_free_number,
)

Verdict = Union[bool, Literal["exhausted-caps"]]
EXHAUSTED = "exhausted-caps"


@dataclass(frozen=True)
class SpectrumQuery:
    k: int
    test_bound: int = 1
    max_families: int | None = None  # node budget for the family search
    max_members: int | None = None
    maximal_only: bool = False
    reduce: bool = True

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.test_bound < 1:
            raise ValueError("test bound must be >= 1")
        for cap in (self.max_families, self.max_members):
            if cap is not None and cap < 1:
                raise ValueError("caps must be positive")

    def with_k(self, k: int) -> "SpectrumQuery":
        return SpectrumQuery(k, self.test_bound, self.max_families, self.max_members, self.maximal_only, self.reduce)


@dataclass(frozen=True)
class FamilyWitness:
    """A k-large family whose F(A) has no antichain of size k + 1."""

    family: AntichainFamily
    fposet_cellularity: int
    fposet_antichain: tuple[int, ...]  # positions in f_poset(family).sets


@dataclass(frozen=True)
class ProductWitness:
    """A test poset Q with c(Q) <= k and an antichain of P x Q of size > k."""

    test_poset: Preorder
    test_cellularity: int
    antichain: tuple[int, ...]


@dataclass
class SpectrumReport:
    verdict: Verdict
    k: int
    mode: str
    witness: FamilyWitness | ProductWitness | None = None
    nodes: int = 0
    millis: float = 0.0
    test_bound: int | None = None

    def __post_init__(self) -> None:
        if self.verdict is False and self.witness is None:
            raise AssertionError("negative verdicts carry a witness")


class _CapHit(Exception):
    pass


def antichains(P: Preorder) -> list[int]:
    """Every nonempty antichain of ``P`` as a bitmask."""
    return list(all_cliques(P.incompatibility))


def _fposet_sets(members: Iterable[int]) -> list[int]:
    found: set[int] = set()
    for m in members:
        sub = m
        while True:
            found.add(sub)
            if sub == 0:
                break
            sub = (sub - 1) & m
    return sorted(found, key=bits)


def fposet_antichain_above(members: Iterable[int], k: int) -> list[int] | None:
    """Antichain of size ``k + 1`` in F(members), as set masks, or None.

    Incompatibility is the union test, computed directly on masks.
    """
    sets = _fposet_sets(members)
    present = set(sets)
    adj = []
    for s in sets:
        m = 0
        for j, t in enumerate(sets):
            if (s | t) not in present:
                m |= 1 << j
        adj.append(m)
    w = max_clique(adj, target=k + 1)
    if len(w) > k:
        return [sets[i] for i in w]
    return None


class _ThinFamilySearch:
    """Depth-first search for a family with ``|union| >= threshold`` and ``c(F) <= k``.

    Reduced mode restricts to unions of exactly ``threshold`` points and at
    most ``k`` members. Both restrictions lose nothing: intersecting every
    member with a ``threshold``-subset of the union gives an induced
    sub-poset of F(A) with the same incompatibilities, and distinct
    members of a normalized family are pairwise incompatible in F(A).
    """

    def __init__(self, P: Preorder, k: int, threshold: int, q: SpectrumQuery) -> None:
        self.P, self.k, self.threshold, self.q = P, k, threshold, q
        self.nodes = 0
        self.capped = False

    def _tick(self) -> None:
        self.nodes += 1
        if self.q.max_families is not None and self.nodes > self.q.max_families:
            raise _CapHit

    def run(self) -> list[int] | None:
        P = self.P
        if P.size < self.threshold:
            return None
        try:
            if self.q.maximal_only:
                ants = sorted((sum(1 << v for v in c) for c in maximal_cliques(P.incompatibility)),
                              key=lambda a: (-a.bit_count(), bits(a)))
                self.capped = True  # heuristic: a miss proves nothing
                return self._unreduced(ants)
            ants = sorted(antichains(P), key=lambda a: (-a.bit_count(), bits(a)))
            if not self.q.reduce:
                return self._unreduced(ants)
            return self._reduced(ants)
        except _CapHit:
            self.capped = True
            return None

    def _member_limit(self) -> int:
        limit = self.k
        if self.q.max_members is not None and self.q.max_members < limit:
            self.capped = True
            limit = self.q.max_members
        return limit

    def _reduced(self, ants: list[int]) -> list[int] | None:
        n, t = self.P.size, self.threshold
        limit = self._member_limit()
        candidates = []
        for combo in combinations(range(n), t):
            U = sum(1 << v for v in combo)
            best = max((a.bit_count() for a in ants if a & ~U == 0), default=0)
            candidates.append((-best, combo, U))
        candidates.sort()
        for _, _, U in candidates:
            cands = [a for a in ants if a & ~U == 0]
            suffix = [0] * (len(cands) + 1)
            for j in range(len(cands) - 1, -1, -1):
                suffix[j] = suffix[j + 1] | cands[j]
            if suffix[0] != U:
                continue
            found = self._dfs(cands, suffix, U, 0, [], 0, limit)
            if found is not None:
                return found
        return None

    def _dfs(self, cands, suffix, U, i, chosen, covered, limit):
        self._tick()
        if covered == U and chosen:
            if fposet_antichain_above(chosen, self.k) is None:
                return list(chosen)
        if len(chosen) == limit or (covered | suffix[i]) != U:
            return None
        for j in range(i, len(cands)):
            if (covered | suffix[j]) != U:
                return None
            a = cands[j]
            if any(a & c == a or a & c == c for c in chosen):
                continue
            chosen.append(a)
            found = self._dfs(cands, suffix, U, j + 1, chosen, covered | a, limit)
            chosen.pop()
            if found is not None:
                return found
        return None

    def _unreduced(self, ants: list[int]) -> list[int] | None:
        limit = self.q.max_members
        t = self.threshold

        def rec(i: int, chosen: list[int], union: int) -> list[int] | None:
            self._tick()
            if chosen and union.bit_count() >= t and fposet_antichain_above(chosen, self.k) is None:
                return list(chosen)
            if limit is not None and len(chosen) >= limit:
                if i < len(ants):
                    self.capped = True
                return None
            for j in range(i, len(ants)):
                a = ants[j]
                if any(a & c == a or a & c == c for c in chosen):
                    continue
                chosen.append(a)
                found = rec(j + 1, chosen, union | a)
                chosen.pop()
                if found is not None:
                    return found
            return None

        return rec(0, [], 0)


def find_thin_family(P: Preorder, k: int, threshold: int, q: SpectrumQuery | None = None):
    """Search for a family of antichains with union of at least ``threshold``
    points whose F(A) has cellularity at most ``k``.

    Returns ``(members or None, nodes, capped)``.
    """
    q = q or SpectrumQuery(k)
    s = _ThinFamilySearch(P, k, threshold, q)
    found = s.run()
    return found, s.nodes, s.capped


def _family_witness(P: Preorder, members: list[int]) -> FamilyWitness:
    fam = AntichainFamily.from_members(P, [bits(m) for m in members])
    fp = f_poset(fam)
    c, w = cellularity(fp.as_preorder)
    return FamilyWitness(fam, c, tuple(w))


def char_k(P: Preorder, q: SpectrumQuery) -> SpectrumReport:
    """Is every k-large family's F(A) of cellularity above k?

    A negative verdict carries the offending family; ``exhausted-caps``
    means the caps stopped the search before it was complete.
    """
    if P.size == 0:
        raise EmptyPoset("char_k needs a nonempty preorder")
    start = time.perf_counter()
    found, nodes, capped = find_thin_family(P, q.k, q.k + 1, q)
    millis = (time.perf_counter() - start) * 1000
    if found is not None:
        return SpectrumReport(False, q.k, "char", _family_witness(P, found), nodes, millis)
    return SpectrumReport(EXHAUSTED if capped else True, q.k, "char", None, nodes, millis)


def verify_family_witness(P: Preorder, k: int, w: FamilyWitness) -> bool:
    """Re-check a negative char verdict from scratch."""
    if w.family.base != P or not w.family.is_k_large(k):
        return False
    fp = f_poset(w.family)
    c, _ = cellularity(fp.as_preorder)
    return c <= k and c == w.fposet_cellularity and is_antichain(fp.as_preorder, w.fposet_antichain)


def rel_spectrum_member(P: Preorder, q: SpectrumQuery, instances: Iterable[Preorder] | None = None) -> SpectrumReport:
    """Does ``c(Q) <= k`` force ``c(P x Q) <= k`` for every test poset Q?

    Test posets default to all canonical preorders of size up to the
    query's test bound; larger ones in a supplied stream are skipped.
    """
    if P.size == 0:
        raise EmptyPoset("rel_spectrum_member needs a nonempty preorder")
    start = time.perf_counter()
    k, N = q.k, q.test_bound
    if instances is None:
        instances = enumerate_preorders(N)
    nodes = 0
    for Q in instances:
        if Q.size > N:
            continue
        nodes += 1
        if cellularity_exceeds(Q, k) is not None:
            continue
        w = cellularity_exceeds(product(P, Q), k)
        if w is not None:
            cq, _ = cellularity(Q)
            millis = (time.perf_counter() - start) * 1000
            return SpectrumReport(False, k, "oracle", ProductWitness(Q, cq, tuple(w)), nodes, millis, N)
    millis = (time.perf_counter() - start) * 1000
    return SpectrumReport(True, k, "oracle", None, nodes, millis, N)


def verify_product_witness(P: Preorder, k: int, w: ProductWitness) -> bool:
    c_q, _ = cellularity(w.test_poset)
    return c_q <= k and len(w.antichain) > k and is_antichain(product(P, w.test_poset), w.antichain)


@dataclass
class SpectrumSet:
    members: list[int]
    fin_pc: int | None
    undecided: list[int]
    reports: dict[int, SpectrumReport]
    mode: str
    kmax: int


def spectrum_set(P: Preorder, kmax: int, mode: str = "char", q: SpectrumQuery | None = None,
                 instances: list[Preorder] | None = None) -> SpectrumSet:
    """Raw membership set ``{k <= kmax : k in spectrum}``; no upward closure assumed."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if mode not in ("char", "oracle"):
        raise ValueError(f"unknown mode {mode!r}")
    q = q or SpectrumQuery(1)
    if mode == "oracle" and instances is None:
        instances = list(enumerate_preorders(q.test_bound))
    reports = {}
    for k in range(1, kmax + 1):
        qk = q.with_k(k)
        reports[k] = char_k(P, qk) if mode == "char" else rel_spectrum_member(P, qk, instances)
    members = [k for k, r in reports.items() if r.verdict is True]
    undecided = [k for k, r in reports.items() if r.verdict == EXHAUSTED]
    return SpectrumSet(members, min(members) if members else None, undecided, reports, mode, kmax)


@dataclass
class ChainReport:
    c: int
    c_witness: list[int]
    d: int
    d_witness: list[int]
    ind: dict[int, int]
    ind_witness: dict[int, list[int]]
    fin_pc: int | None
    spectrum: list[int]
    violations: list[str] = field(default_factory=list)


def invariant_chain_report(P: Preorder, nmax: int = 4, q: SpectrumQuery | None = None,
                           check_denspec: bool = True) -> ChainReport:
    """Compute c, fin-pc, ind_2..ind_nmax and d, recording every failed inequality."""
    if nmax < 2:
        raise BadArity("nmax must be >= 2")
    if P.size == 0:
        raise EmptyPoset("invariant chain of an empty preorder")
    c, cw = cellularity(P)
    d, dw = density(P)
    ind, indw = {}, {}
    for n in range(2, nmax + 1):
        ind[n], indw[n] = linked_free_number(P, n)
    spec = spectrum_set(P, max(P.size, 1), "char", q)
    # beyond |P| no family is k-large, so membership there is vacuous
    fin_pc = spec.fin_pc if spec.fin_pc is not None else None
    bad = []
    if c != ind[2]:
        bad.append(f"c={c} differs from ind_2={ind[2]}")
    for n in range(2, nmax):
        if ind[n] > ind[n + 1]:
            bad.append(f"ind_{n}={ind[n]} exceeds ind_{n + 1}={ind[n + 1]}")
    for n in range(2, nmax + 1):
        if ind[n] > (n - 1) * d:
            bad.append(f"ind_{n}={ind[n]} exceeds {n - 1}*d={(n - 1) * d}")
    if c > d:
        bad.append(f"c={c} exceeds d={d}")
    if fin_pc is not None and c > fin_pc:
        bad.append(f"c={c} exceeds fin-pc={fin_pc}")
    if c >= 2:
        # the one-point test poset already separates every k < c
        r = rel_spectrum_member(P, SpectrumQuery(c - 1, 1))
        if r.verdict is not False:
            bad.append(f"oracle admits k={c - 1} below c={c}")
    if check_denspec:
        k = 1
        while k * d + 1 <= P.size:
            found, _, capped = find_thin_family(P, k, k * d + 1, q.with_k(k) if q else None)
            if found is not None:
                bad.append(f"family {[bits(m) for m in found]} with union >= {k * d + 1} has c(F) <= {k}")
            k += 1
    return ChainReport(c, cw, d, dw, ind, indw, fin_pc, spec.members, bad)


@dataclass(frozen=True)
class Tech2Result:
    holds: bool
    vacuous: bool


def lemma_tech2_check(family: AntichainFamily, A: Iterable[int], n: int) -> Tech2Result:
    """If ``A`` is n-linked, its singletons form an antichain of F(A)."""
    if n < 2:
        raise BadArity(f"n must be >= 2, got {n}")
    P = family.base
    amask = P.mask(A)
    if amask & ~family.union:
        raise PreconditionUnmet(f"{bits(amask)} is not inside the family's union")
    if not is_n_linked(P, bits(amask), n):
        return Tech2Result(True, True)
    fp = f_poset(family)
    singles = [fp.index[1 << a] for a in bits(amask)]
    return Tech2Result(is_antichain(fp.as_preorder, singles), False)


@dataclass
class ProductSpectrumRecord:
    spec_p: list[int]
    spec_q: list[int]
    spec_pq: list[int]
    inclusion_holds: bool
    pullback_failures: list[int]
    reverse_discrepancies: list[int]
    kmax: int
    test_bound: int


def product_spectrum_check(P: Preorder, Q: Preorder, kmax: int, N: int) -> ProductSpectrumRecord:
    """Oracle spectra of P, Q and P x Q relative to test posets of size <= N.

    For each ``k`` outside the spectrum of a factor, the factor's witness
    antichain is pulled back along the projection, which exhibits ``k``
    outside the product's spectrum too. The reverse inclusion is only
    reported.
    """
    instances = list(enumerate_preorders(N))
    q = SpectrumQuery(1, N)
    PQ = product(P, Q)
    sp = spectrum_set(P, kmax, "oracle", q, instances)
    sq = spectrum_set(Q, kmax, "oracle", q, instances)
    spq = spectrum_set(PQ, kmax, "oracle", q, instances)
    failures = []
    for factor_set, left in ((sp, True), (sq, False)):
        proj = projection(P, Q, left=left)
        for k, rep in factor_set.reports.items():
            if rep.verdict is not False:
                continue
            w = rep.witness
            lifted = pullback_antichain(proj, w.test_poset, w.antichain)
            ok = (len(lifted) > k and w.test_cellularity <= k
                  and is_antichain(product(PQ, w.test_poset), lifted)
                  and k not in spq.members)
            if not ok:
                failures.append(k)
    both = set(sp.members) & set(sq.members)
    return ProductSpectrumRecord(
        sp.members, sq.members, spq.members,
        set(spq.members) <= both,
        sorted(set(failures)),
        sorted(both - set(spq.members)),
        kmax, N,
    )


def direction_check(P: Preorder, k: int, report: SpectrumReport) -> str | None:
    """For a negative char verdict, confirm F(A) itself defeats k in the product oracle.

    Returns a description of the failure, or None when the implication holds.
    """
    if report.verdict is not False:
        return None
    w = report.witness
    T = t_family(w.family)
    Q = T.fposet.as_preorder
    q = SpectrumQuery(k, Q.size)
    rel = rel_spectrum_member(P, q, InstanceStream("explicit", items=(Q,)))
    if rel.verdict is not False:
        return f"F(A) of size {Q.size} is not a product witness at k={k}"
    if not T.verified or len(T.members) <= k:
        return f"t_family of size {len(T.members)} does not exceed k={k}"
    return None
