import sys
from itertools import combinations

import pytest
from hypothesis import strategies as st

from cellspec import Preorder


def v_poset() -> Preorder:
    """Two maximal points 0 and 1 over a common bottom 2."""
    return Preorder.from_pairs(3, [(2, 0), (2, 1)], auto_close=True)


def bottomed(n: int) -> Preorder:
    """Point 0 below everything, the rest pairwise incomparable."""
    return Preorder.from_pairs(n, [(0, j) for j in range(1, n)], auto_close=True)


@st.composite
def preorders(draw, max_size: int = 7):
    n = draw(st.integers(1, max_size))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n * n))
    return Preorder.from_pairs(n, pairs, auto_close=True)


def naive_antichain(P: Preorder, A) -> bool:
    """Pairwise check straight from the definition, no bitmasks."""
    for p, q in combinations(A, 2):
        if any(P.leq(r, p) and P.leq(r, q) for r in range(P.size)):
            return False
    return True


@pytest.fixture
def flat3() -> Preorder:
    return Preorder.flat(3)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, status = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
