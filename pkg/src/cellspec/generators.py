"""Instance supply: canonical forms, exhaustive enumeration, seeded sampling."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Iterator, Sequence

from .clique import bits
from .errors import CapExceeded, RelationNotReflexive, RelationNotTransitive
from .order import Preorder

CANONICAL_CAP = 10
EXHAUSTIVE_CAP = 6
LABELED_CAP = 4


@dataclass(frozen=True)
class CanonicalForm:
    permutation: tuple[int, ...]  # canonical position -> original index
    code: bytes


def _refine(P: Preorder) -> list[int]:
    """Isomorphism-invariant vertex colours (small ints, ordered canonically)."""
    n = P.size
    strict_down = [P.down[v] & ~(1 << v) for v in range(n)]
    strict_up = [P.up[v] & ~(1 << v) for v in range(n)]
    sigs = [(strict_down[v].bit_count(), strict_up[v].bit_count()) for v in range(n)]
    ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
    colors = [ranks[s] for s in sigs]
    while True:
        sigs = [
            (
                colors[v],
                tuple(sorted(colors[u] for u in bits(strict_down[v]))),
                tuple(sorted(colors[u] for u in bits(strict_up[v]))),
            )
            for v in range(n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _twins(P: Preorder, u: int, v: int) -> bool:
    others = ~((1 << u) | (1 << v))
    return (
        P.down[u] & others == P.down[v] & others
        and P.up[u] & others == P.up[v] & others
        and P.leq(u, v) == P.leq(v, u)
    )


def _encode(n: int, value: int) -> bytes:
    nbits = n * (n - 1)
    return bytes([n]) + value.to_bytes((nbits + 7) // 8, "big")


def canonical_form(P: Preorder) -> CanonicalForm:
    """Lexicographically least relation code over colour-respecting orderings.

    The code lists, for each position ``m`` in turn, the pairs
    ``(leq(m, j), leq(j, m))`` for ``j < m``. Orderings must list vertices
    by nondecreasing refined colour; among interchangeable twins only the
    lowest index is tried at each depth.
    """
    n = P.size
    if n > CANONICAL_CAP:
        raise CapExceeded(f"canonical_form supports size <= {CANONICAL_CAP}, got {n}")
    if n == 0:
        return CanonicalForm((), _encode(0, 0))
    colors = _refine(P)
    down = P.down
    best_code: int | None = None
    best_perm: list[int] = []
    best_prefix: list[int] = [0] * (n + 1)

    def chunk_for(v: int, placed: Sequence[int]) -> int:
        chunk = 0
        for w in placed:
            chunk = (chunk << 2) | ((down[w] >> v & 1) << 1) | (down[v] >> w & 1)
        return chunk

    def rec(placed: list[int], remaining: int, prefix: int) -> None:
        nonlocal best_code, best_perm
        depth = len(placed)
        if depth == n:
            if best_code is None or prefix < best_code:
                best_code, best_perm = prefix, list(placed)
                code = 0
                for m, v in enumerate(best_perm):
                    code = (code << (2 * m)) | chunk_for(v, best_perm[:m])
                    best_prefix[m + 1] = code
            return
        rem = bits(remaining)
        low = min(colors[v] for v in rem)
        tried: list[int] = []
        for v in rem:
            if colors[v] != low or any(_twins(P, u, v) for u in tried):
                continue
            tried.append(v)
            # prefixes of equal depth have equal bit length, so int order is lexicographic
            code = (prefix << (2 * depth)) | chunk_for(v, placed)
            if best_code is not None and code > best_prefix[depth + 1]:
                continue
            placed.append(v)
            rec(placed, remaining & ~(1 << v), code)
            placed.pop()

    rec([], (1 << n) - 1, 0)
    assert best_code is not None
    return CanonicalForm(tuple(best_perm), _encode(n, best_code))


def canonical_representative(P: Preorder) -> Preorder:
    return P.relabel(canonical_form(P).permutation)


def _extensions(R: Preorder) -> Iterator[Preorder]:
    """All one-point extensions of ``R`` where the new point is maximal.

    The new point gets down-set ``D`` (down-closed in ``R``) and up-set
    ``U`` inside ``D`` whose members bound all of ``D`` from above, i.e.
    the new point joins the class of ``U`` or sits alone on top.
    """
    m = R.size
    full = (1 << m) - 1
    downsets = [D for D in range(full + 1) if all(R.down[v] & ~D == 0 for v in bits(D))]
    for D in downsets:
        tops = [u for u in bits(D) if R.down[u] & D == D]  # u bounds every member of D
        top_mask = sum(1 << u for u in tops)
        # U must be up-closed in R and contained in the tops of D
        for U in _submasks(top_mask):
            if any(R.up[u] & ~U for u in bits(U)):
                continue
            down = list(R.down)
            for u in bits(U):
                down[u] |= 1 << m
            new_down = D | (1 << m)
            down.append(new_down)
            yield Preorder(m + 1, tuple(down))


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@lru_cache(maxsize=None)
def _canonical_level(n: int) -> tuple[Preorder, ...]:
    if n == 1:
        return (Preorder(1, (1,)),)
    found: dict[bytes, Preorder] = {}
    for R in _canonical_level(n - 1):
        for P in _extensions(R):
            cf = canonical_form(P)
            if cf.code not in found:
                found[cf.code] = P.relabel(cf.permutation)
    return tuple(found[c] for c in sorted(found))


@dataclass
class InstanceStream:
    """Iterable supply of preorders.

    ``kind`` is ``"exhaustive"`` (one canonical representative per
    isomorphism class, sizes ``1..max_size``, ascending size then canonical
    bytes), ``"random"`` (instance ``i`` drawn with seed ``seed ^ i``), or
    ``"explicit"`` (a fixed list).
    """

    kind: str
    max_size: int = 0
    count: int = 0
    size: int | tuple[int, int] = 1
    edge_bias: float | Fraction | tuple = 0.0
    seed: int = 0
    items: tuple[Preorder, ...] = ()
    counts: dict[int, int] = field(default_factory=dict)

    def __iter__(self) -> Iterator[Preorder]:
        if self.kind == "exhaustive":
            for n in range(1, self.max_size + 1):
                level = _canonical_level(n)
                self.counts[n] = len(level)
                yield from level
        elif self.kind == "random":
            for i in range(self.count):
                yield self.random_instance(i)
        elif self.kind == "explicit":
            yield from self.items
        else:
            raise ValueError(f"unknown stream kind {self.kind!r}")

    def random_instance(self, i: int) -> Preorder:
        """Sizes cycle through the range; biases advance once per full size cycle."""
        lo, hi = self.size if isinstance(self.size, tuple) else (self.size, self.size)
        span = hi - lo + 1
        biases = self.edge_bias if isinstance(self.edge_bias, tuple) else (self.edge_bias,)
        return random_preorder(lo + i % span, biases[(i // span) % len(biases)], self.seed ^ i)


def enumerate_preorders(max_size: int) -> InstanceStream:
    if max_size > EXHAUSTIVE_CAP:
        raise CapExceeded(f"exhaustive enumeration supports size <= {EXHAUSTIVE_CAP}, got {max_size}")
    return InstanceStream("exhaustive", max_size=max_size)


def canonical_preorders(max_size: int) -> list[Preorder]:
    return list(enumerate_preorders(max_size))


def random_stream(count: int, size: int | tuple[int, int], edge_bias, seed: int) -> InstanceStream:
    return InstanceStream("random", count=count, size=size, edge_bias=edge_bias, seed=seed)


def random_preorder(size: int, edge_bias: float | Fraction, seed: int) -> Preorder:
    """Each off-diagonal pair ``i <= j`` kept with probability ``edge_bias``, then closed.

    Pairs are drawn in row-major order from ``random.Random(seed)``.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    p = float(edge_bias)
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge_bias must lie in [0, 1]")
    rng = random.Random(seed)
    pairs = []
    for i in range(size):
        for j in range(size):
            if i != j and rng.random() < p:
                pairs.append((i, j))
    return Preorder.from_pairs(size, pairs, auto_close=True)


def labeled_preorders(n: int) -> Iterator[Preorder]:
    """Every reflexive-transitive relation on ``n`` labelled points.

    Brute force over all ``2**(n*n - n)`` off-diagonal patterns; kept as an
    oracle independent of the extension-based enumeration.
    """
    if n > LABELED_CAP:
        raise CapExceeded(f"labelled brute force supports size <= {LABELED_CAP}, got {n}")
    offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
    for pattern in range(1 << len(offdiag)):
        pairs = [(i, i) for i in range(n)]
        pairs += [offdiag[b] for b in range(len(offdiag)) if pattern >> b & 1]
        try:
            yield Preorder.from_pairs(n, pairs, auto_close=False)
        except (RelationNotReflexive, RelationNotTransitive):
            continue


def automorphism_count(P: Preorder) -> int:
    """Number of order automorphisms, by testing every permutation."""
    n = P.size
    count = 0
    for perm in permutations(range(n)):
        if all(P.leq(perm[i], perm[j]) == P.leq(i, j) for i in range(n) for j in range(n)):
            count += 1
    return count


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm
