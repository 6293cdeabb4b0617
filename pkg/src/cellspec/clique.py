"""Clique search on small graphs given as adjacency bitmasks.

``adj[v]`` is an int whose bit ``u`` is set iff ``u`` and ``v`` are adjacent.
Self-loops are ignored. Every routine here is deterministic.
"""
from __future__ import annotations

from typing import Iterator, Sequence


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in ascending order."""
    return list(_bits(mask))


def degeneracy_order(adj: Sequence[int]) -> list[int]:
    """Vertices ordered by repeatedly removing a minimum-degree vertex.

    Ties go to the lowest index. The returned list is reversed so that
    the dense core comes first, which suits the clique search.
    """
    n = len(adj)
    alive = (1 << n) - 1
    removed: list[int] = []
    while alive:
        best_v, best_deg = -1, n + 1
        for v in _bits(alive):
            deg = (adj[v] & alive & ~(1 << v)).bit_count()
            if deg < best_deg:
                best_v, best_deg = v, deg
        removed.append(best_v)
        alive &= ~(1 << best_v)
    removed.reverse()
    return removed


class _Search:
    def __init__(self, adj: Sequence[int], target: int | None) -> None:
        order = degeneracy_order(adj)
        pos = {v: i for i, v in enumerate(order)}
        self.order = order
        # adjacency re-indexed so bit i means the i-th vertex of ``order``
        self.adj = []
        for v in order:
            m = 0
            for u in _bits(adj[v] & ~(1 << v)):
                m |= 1 << pos[u]
            self.adj.append(m)
        self.best: list[int] = []
        self.target = target
        self.nodes = 0

    def _color_sort(self, cand: int) -> tuple[list[int], list[int]]:
        verts: list[int] = []
        colors: list[int] = []
        color = 0
        uncolored = cand
        adj = self.adj
        while uncolored:
            color += 1
            q = uncolored
            while q:
                low = q & -q
                v = low.bit_length() - 1
                q &= ~adj[v] & ~low
                uncolored &= ~low
                verts.append(v)
                colors.append(color)
        return verts, colors

    def expand(self, clique: list[int], cand: int) -> bool:
        """Returns True when the target size has been reached."""
        self.nodes += 1
        verts, colors = self._color_sort(cand)
        for i in range(len(verts) - 1, -1, -1):
            if len(clique) + colors[i] <= len(self.best):
                return False
            v = verts[i]
            clique.append(v)
            new_cand = cand & self.adj[v]
            if new_cand:
                if self.expand(clique, new_cand):
                    return True
            elif len(clique) > len(self.best):
                self.best = list(clique)
                if self.target is not None and len(self.best) >= self.target:
                    return True
            clique.pop()
            cand &= ~(1 << v)
        return False


def max_clique(adj: Sequence[int], target: int | None = None) -> list[int]:
    """Maximum clique by branch and bound with greedy-coloring bounds.

    With ``target`` set, the search stops as soon as a clique of that size
    is found, so the result is only guaranteed maximum when it is smaller
    than ``target``. Returns the clique as a sorted list of vertices.
    """
    if not adj:
        return []
    s = _Search(adj, target)
    s.expand([], (1 << len(adj)) - 1)
    return sorted(s.order[i] for i in s.best)


def max_clique_with_stats(adj: Sequence[int], target: int | None = None) -> tuple[list[int], int]:
    if not adj:
        return [], 0
    s = _Search(adj, target)
    s.expand([], (1 << len(adj)) - 1)
    return sorted(s.order[i] for i in s.best), s.nodes


def brute_force_max_clique(adj: Sequence[int], limit: int = 20) -> list[int]:
    """Maximum clique by enumerating every vertex subset.

    Independent of :func:`max_clique`: a subset is a clique iff removing its
    highest vertex leaves a clique adjacent to that vertex. Ties resolve to
    the numerically smallest subset mask.
    """
    n = len(adj)
    if n > limit:
        raise ValueError(f"brute force refused for {n} vertices (limit {limit})")
    is_clique = bytearray(1 << n)
    is_clique[0] = 1
    best_mask, best_size = 0, 0
    for mask in range(1, 1 << n):
        top = mask.bit_length() - 1
        rest = mask ^ (1 << top)
        if is_clique[rest] and (adj[top] & rest) == rest:
            is_clique[mask] = 1
            size = mask.bit_count()
            if size > best_size:
                best_mask, best_size = mask, size
    return bits(best_mask)


def maximal_cliques(adj: Sequence[int]) -> Iterator[list[int]]:
    """All maximal cliques (Bron-Kerbosch with pivoting), each sorted."""
    n = len(adj)
    clean = [adj[v] & ~(1 << v) for v in range(n)]

    def bk(r: list[int], p: int, x: int) -> Iterator[list[int]]:
        if not p and not x:
            yield sorted(r)
            return
        pivot_pool = p | x
        pivot = max(_bits(pivot_pool), key=lambda u: ((clean[u] & p).bit_count(), -u))
        for v in _bits(p & ~clean[pivot]):
            r.append(v)
            yield from bk(r, p & clean[v], x & clean[v])
            r.pop()
            p &= ~(1 << v)
            x |= 1 << v

    if n == 0:
        return
    yield from bk([], (1 << n) - 1, 0)


def all_cliques(adj: Sequence[int], within: int | None = None) -> Iterator[int]:
    """Every nonempty clique, as a bitmask, in depth-first lexicographic order."""
    n = len(adj)
    clean = [adj[v] & ~(1 << v) for v in range(n)]
    pool = (1 << n) - 1 if within is None else within

    def rec(current: int, cand: int) -> Iterator[int]:
        for v in _bits(cand):
            nxt = current | (1 << v)
            yield nxt
            higher = cand & ~((1 << (v + 1)) - 1)
            yield from rec(nxt, higher & clean[v])

    yield from rec(0, pool)
