"""Finite preorders and their exact invariants.

A preorder on ``0..size-1`` is stored as down-set bitmasks: bit ``j`` of
``down[i]`` is set iff ``j <= i``. Two elements are compatible when their
down-sets meet, so most predicates reduce to a couple of integer ANDs.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .clique import bits, brute_force_max_clique, max_clique
from .errors import (
    BadArity,
    EmptyPoset,
    EmptySet,
    IndexOutOfRange,
    RelationNotReflexive,
    RelationNotTransitive,
)


def _close(size: int, down: list[int]) -> list[int]:
    down = [d | (1 << i) for i, d in enumerate(down)]
    for k in range(size):
        dk = down[k]
        bit = 1 << k
        for i in range(size):
            if down[i] & bit:
                down[i] |= dk
    return down


@dataclass(frozen=True)
class Preorder:
    size: int
    down: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.size < 0 or len(self.down) != self.size:
            raise IndexOutOfRange(f"expected {self.size} down-sets, got {len(self.down)}")
        full = (1 << self.size) - 1
        for i, d in enumerate(self.down):
            if d & ~full:
                raise IndexOutOfRange(f"down-set of {i} mentions an index >= {self.size}")
            if not d >> i & 1:
                raise RelationNotReflexive(f"element {i} is not <= itself")
        for i, d in enumerate(self.down):
            for j in bits(d):
                if self.down[j] & ~d:
                    k = bits(self.down[j] & ~d)[0]
                    raise RelationNotTransitive(f"{k} <= {j} and {j} <= {i} but not {k} <= {i}")

    @classmethod
    def from_pairs(cls, size: int, pairs: Iterable[Sequence[int]], auto_close: bool = False) -> "Preorder":
        """Build from ``(i, j)`` pairs meaning ``i <= j``.

        With ``auto_close`` the reflexive-transitive closure is taken;
        otherwise the pairs must already describe a preorder.
        """
        down = [0] * size
        for pair in pairs:
            i, j = pair
            if not (0 <= i < size and 0 <= j < size):
                raise IndexOutOfRange(f"pair ({i}, {j}) outside 0..{size - 1}")
            down[j] |= 1 << i
        if auto_close:
            down = _close(size, down)
        return cls(size, tuple(down))

    @classmethod
    def from_matrix(cls, leq: Sequence[Sequence[bool]]) -> "Preorder":
        n = len(leq)
        return cls.from_pairs(n, [(i, j) for i in range(n) for j in range(n) if leq[i][j]])

    @classmethod
    def chain(cls, n: int) -> "Preorder":
        return cls(n, tuple((1 << (i + 1)) - 1 for i in range(n)))

    @classmethod
    def flat(cls, n: int) -> "Preorder":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def indiscrete(cls, n: int) -> "Preorder":
        return cls(n, ((1 << n) - 1,) * n)

    def leq(self, i: int, j: int) -> bool:
        return bool(self.down[j] >> i & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted((i, j) for j in range(self.size) for i in bits(self.down[j]))

    def matrix(self) -> list[list[bool]]:
        return [[self.leq(i, j) for j in range(self.size)] for i in range(self.size)]

    @cached_property
    def up(self) -> tuple[int, ...]:
        up = [0] * self.size
        for j, d in enumerate(self.down):
            for i in bits(d):
                up[i] |= 1 << j
        return tuple(up)

    @cached_property
    def incompatibility(self) -> tuple[int, ...]:
        """Adjacency bitmasks of the incompatibility graph."""
        n = self.size
        adj = []
        for p in range(n):
            m = 0
            dp = self.down[p]
            for q in range(n):
                if not dp & self.down[q]:
                    m |= 1 << q
            adj.append(m)
        return tuple(adj)

    def check_index(self, *idx: int) -> None:
        for i in idx:
            if not 0 <= i < self.size:
                raise IndexOutOfRange(f"index {i} outside 0..{self.size - 1}")

    def mask(self, members: Iterable[int]) -> int:
        m = 0
        for i in members:
            self.check_index(i)
            m |= 1 << i
        return m

    def restrict(self, members: Sequence[int]) -> "Preorder":
        """Induced sub-preorder on ``members``, relabelled in the given order."""
        pos = {v: i for i, v in enumerate(members)}
        down = []
        for v in members:
            down.append(sum(1 << pos[u] for u in bits(self.down[v]) if u in pos))
        return Preorder(len(members), tuple(down))

    def relabel(self, perm: Sequence[int]) -> "Preorder":
        """Preorder whose element ``a`` plays the role of ``perm[a]`` here."""
        return self.restrict(perm)


@dataclass(frozen=True)
class MonotoneMap:
    source: Preorder
    target: Preorder
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.image) != self.source.size:
            raise IndexOutOfRange("image length differs from source size")
        self.target.check_index(*self.image)


def validate_preorder(size: int, pairs: Iterable[Sequence[int]], auto_close: bool) -> Preorder:
    return Preorder.from_pairs(size, pairs, auto_close=auto_close)


def compatible(P: Preorder, p: int, q: int) -> bool:
    P.check_index(p, q)
    return bool(P.down[p] & P.down[q])


def is_antichain(P: Preorder, A: Iterable[int]) -> bool:
    members = sorted(set(A))
    P.check_index(*members)
    for i, p in enumerate(members):
        for q in members[i + 1:]:
            if P.down[p] & P.down[q]:
                return False
    return True


def cellularity(P: Preorder) -> tuple[int, list[int]]:
    """Largest antichain size together with one maximum antichain."""
    if P.size == 0:
        raise EmptyPoset("cellularity of an empty preorder")
    w = max_clique(P.incompatibility)
    return len(w), w


def cellularity_bruteforce(P: Preorder) -> tuple[int, list[int]]:
    if P.size == 0:
        raise EmptyPoset("cellularity of an empty preorder")
    w = brute_force_max_clique(P.incompatibility)
    return len(w), w


def cellularity_exceeds(P: Preorder, k: int) -> list[int] | None:
    """An antichain of size ``k + 1`` if one exists, else None."""
    w = max_clique(P.incompatibility, target=k + 1)
    return w if len(w) > k else None


def is_dense(P: Preorder, D: Iterable[int]) -> bool:
    dmask = P.mask(D)
    return all(d & dmask for d in P.down)


def minimal_classes(P: Preorder) -> list[int]:
    """Equivalence classes (as masks) of the minimal elements, by lowest member."""
    seen = 0
    classes = []
    for p in range(P.size):
        if seen >> p & 1:
            continue
        cls = P.down[p] & P.up[p]
        if P.down[p] == cls:
            classes.append(cls)
            seen |= cls
    return classes


def density(P: Preorder) -> tuple[int, list[int]]:
    """Minimum dense subset: one representative from each minimal class.

    Every element sits above some minimal element, and a dense set has to
    meet each minimal class, so the count of minimal classes is exact.
    """
    if P.size == 0:
        raise EmptyPoset("density of an empty preorder")
    witness = [bits(c)[0] for c in minimal_classes(P)]
    return len(witness), witness


def density_bruteforce(P: Preorder) -> tuple[int, list[int]]:
    if P.size == 0:
        raise EmptyPoset("density of an empty preorder")
    for r in range(1, P.size + 1):
        for D in combinations(range(P.size), r):
            if is_dense(P, D):
                return r, list(D)
    raise AssertionError("the whole carrier is always dense")


def _common_lower_bound(P: Preorder, members: Iterable[int]) -> int:
    m = (1 << P.size) - 1
    for p in members:
        m &= P.down[p]
    return m


def is_n_linked(P: Preorder, A: Iterable[int], n: int) -> bool:
    """Every ``n``-element subset of ``A`` has a common lower bound.

    Vacuously true when ``|A| < n``.
    """
    if n < 2:
        raise BadArity(f"n must be >= 2, got {n}")
    members = sorted(set(A))
    P.check_index(*members)
    return all(_common_lower_bound(P, F) for F in combinations(members, n))


def is_centered(P: Preorder, A: Iterable[int]) -> bool:
    members = sorted(set(A))
    if not members:
        raise EmptySet("centered is defined for nonempty sets")
    linked = all(is_n_linked(P, members, n) for n in range(2, len(members) + 1))
    bounded = bool(_common_lower_bound(P, members))
    if linked != bounded:
        raise AssertionError(f"centered checks disagree on {members}")
    return bounded


def linked_free_number(P: Preorder, n: int) -> tuple[int, list[int]]:
    """Largest subset with no ``n`` distinct members sharing a lower bound.

    Branch and bound over elements in index order. For each size ``j < n``
    the search keeps the nonzero down-set intersections of the ``j``-subsets
    chosen so far; a candidate is blocked once it meets one of size ``n-1``.
    """
    if n < 2:
        raise BadArity(f"n must be >= 2, got {n}")
    if P.size == 0:
        return 0, []
    size = P.size
    down = P.down
    best: list[int] = []

    def rec(start: int, chosen: list[int], layers: list[list[int]]) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (size - start) <= len(best):
            return
        for v in range(start, size):
            if len(chosen) + (size - v) <= len(best):
                return
            dv = down[v]
            if any(m & dv for m in layers[n - 2]):
                continue
            new_layers = [list(layer) for layer in layers]
            new_layers[0].append(dv)
            for j in range(1, n - 1):
                for m in layers[j - 1]:
                    x = m & dv
                    if x:
                        new_layers[j].append(x)
            chosen.append(v)
            rec(v + 1, chosen, new_layers)
            chosen.pop()

    rec(0, [], [[] for _ in range(n - 1)])
    return len(best), best


def linked_free_number_bruteforce(P: Preorder, n: int) -> int:
    if n < 2:
        raise BadArity(f"n must be >= 2, got {n}")
    for r in range(P.size, -1, -1):
        for A in combinations(range(P.size), r):
            if not any(_common_lower_bound(P, F) for F in combinations(A, n)):
                return r
    return 0
