"""Finite topological spaces as explicit lattices of open sets."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .clique import bits
from .constructions import DEFAULT_CAP
from .errors import EmptyPoset, InvalidSpace, NoNonemptyOpen, SizeOverflow
from .order import Preorder

OPENS_CAP = 1 << 12


@dataclass(frozen=True)
class FiniteSpace:
    """``opens`` are point bitmasks sorted ascending as integers."""

    points: int
    opens: tuple[int, ...]

    def __post_init__(self) -> None:
        full = (1 << self.points) - 1
        if list(self.opens) != sorted(set(self.opens)):
            raise InvalidSpace("opens must be distinct and sorted as bit patterns")
        present = set(self.opens)
        if 0 not in present or full not in present:
            raise InvalidSpace("a topology contains the empty set and the whole space")
        for U in self.opens:
            if U & ~full:
                raise InvalidSpace(f"open {bits(U)} leaves the point set")
        for i, U in enumerate(self.opens):
            for V in self.opens[i + 1:]:
                if U | V not in present or U & V not in present:
                    raise InvalidSpace(f"opens {bits(U)} and {bits(V)} break closure")

    @classmethod
    def from_basis(cls, points: int, basis: Iterable[int]) -> "FiniteSpace":
        """Close ``basis`` plus the empty and full sets under unions."""
        basis = sorted(set(basis))
        found = {0, (1 << points) - 1}
        queue = [0]
        while queue:
            S = queue.pop()
            for b in basis:
                V = S | b
                if V not in found:
                    found.add(V)
                    queue.append(V)
            if len(found) > OPENS_CAP:
                raise SizeOverflow(f"more than {OPENS_CAP} open sets")
        return cls(points, tuple(sorted(found)))

    @classmethod
    def discrete(cls, n: int) -> "FiniteSpace":
        return cls(n, tuple(range(1 << n)))

    @classmethod
    def indiscrete(cls, n: int) -> "FiniteSpace":
        return cls(n, (0, (1 << n) - 1) if n else (0,))

    def open_lists(self) -> list[list[int]]:
        return sorted(bits(U) for U in self.opens)

    @cached_property
    def nonempty_opens(self) -> tuple[int, ...]:
        return tuple(U for U in self.opens if U)


def open_poset(X: FiniteSpace) -> Preorder:
    """Nonempty opens ordered by inclusion, in ascending bit-pattern order."""
    if X.points == 0:
        raise NoNonemptyOpen("a space with no points has no nonempty open set")
    opens = X.nonempty_opens
    down = []
    for U in opens:
        down.append(sum(1 << j for j, V in enumerate(opens) if V & U == V))
    return Preorder(len(opens), tuple(down))


def down_closed_sets(Q: Preorder) -> list[int]:
    full = (1 << Q.size) - 1
    return [S for S in range(full + 1) if all(Q.down[v] & ~S == 0 for v in bits(S))]


def alexandrov_space(Q: Preorder) -> FiniteSpace:
    """Topology generated by the down-cones ``{s : s <= q}``."""
    if Q.size == 0:
        raise EmptyPoset("alexandrov space of an empty preorder")
    return FiniteSpace.from_basis(Q.size, Q.down)


def space_product(X: FiniteSpace, Y: FiniteSpace, cap: int = DEFAULT_CAP) -> FiniteSpace:
    """Product topology; point ``(x, y)`` has index ``x * Y.points + y``."""
    n = X.points * Y.points
    if n > cap:
        raise SizeOverflow(f"product space has {n} points, cap is {cap}")
    m = Y.points
    boxes = set()
    for U in X.opens:
        xs = bits(U)
        for V in Y.opens:
            boxes.add(sum(V << (x * m) for x in xs))
    return FiniteSpace.from_basis(n, boxes)
