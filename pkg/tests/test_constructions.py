from itertools import product as cartesian

import pytest
from hypothesis import given, settings

from cellspec import (
    AntichainFamily,
    MonotoneMap,
    PointedPreorder,
    Preorder,
    cellularity,
    f_poset,
    finite_support_product,
    is_antichain,
    product,
    projection,
    pullback_antichain,
    t_family,
    witness_family,
)
from cellspec.constructions import is_monotone, is_monotone_surjection, lemma_tech1_check, pair
from cellspec.errors import (
    NoTopElement,
    NotAFamily,
    NotAnAntichain,
    NotSurjective,
    PreconditionUnmet,
    SetNotInFPoset,
    SizeOverflow,
)

from conftest import bottomed, naive_antichain, preorders

A, B, C = 0, 1, 2


@pytest.fixture
def example_family(flat3):
    return AntichainFamily.from_members(flat3, [[A, B], [B, C]])


class TestProduct:
    def test_one_point_left_factor(self):
        Q = Preorder.from_pairs(3, [(0, 1)], auto_close=True)
        assert product(Preorder.chain(1), Q) == Q

    def test_chains(self):
        P = product(Preorder.chain(2), Preorder.chain(2))
        bottom, top = pair(2, 0, 0), pair(2, 1, 1)
        assert all(P.leq(bottom, x) and P.leq(x, top) for x in range(4))
        assert not P.leq(pair(2, 0, 1), pair(2, 1, 0))

    def test_flat_squared_is_flat(self):
        assert product(Preorder.flat(2), Preorder.flat(2)) == Preorder.flat(4)

    def test_cap(self):
        with pytest.raises(SizeOverflow):
            product(Preorder.flat(10), Preorder.flat(10), cap=50)

    @settings(max_examples=60, deadline=None)
    @given(preorders(4), preorders(4))
    def test_coordinatewise_order(self, P, Q):
        R = product(P, Q)
        for (p, q), (s, t) in cartesian(cartesian(range(P.size), range(Q.size)), repeat=2):
            assert R.leq(pair(Q.size, p, q), pair(Q.size, s, t)) == (P.leq(p, s) and Q.leq(q, t))


class TestFiniteSupport:
    def test_single_factor(self):
        P = PointedPreorder.infer(Preorder.chain(3))
        assert finite_support_product([P]).order == P.order

    def test_two_chains(self):
        f = finite_support_product([PointedPreorder.infer(Preorder.chain(2))] * 2)
        assert f.order.size == 4
        assert all(len(s) <= 2 for s in f.supports)
        assert f.supports[3] == ()

    def test_flat_two_with_top_cubed(self):
        # points 0, 1 incomparable below a top 2
        F = Preorder.from_pairs(3, [(0, 2), (1, 2)], auto_close=True)
        f = finite_support_product([PointedPreorder(F, 2)] * 3)
        assert f.order.size == 27
        assert cellularity(f.order)[0] == 8

    def test_missing_top(self):
        with pytest.raises(NoTopElement):
            PointedPreorder.infer(Preorder.flat(2))
        with pytest.raises(NoTopElement):
            PointedPreorder(Preorder.chain(2), 0)


class TestFPoset:
    def test_singleton_family(self, flat3):
        fp = f_poset(AntichainFamily.from_members(flat3, [[A]]))
        assert fp.set_lists() == [[], [A]]
        assert fp.as_preorder.leq(1, 0)  # the empty set is on top

    def test_example(self, example_family):
        fp = f_poset(example_family)
        assert fp.set_lists() == [[], [A], [A, B], [B], [B, C], [C]]
        assert cellularity(fp.as_preorder)[0] == 2

    def test_empty_antichain_only(self, flat3):
        fp = f_poset(AntichainFamily.from_members(flat3, [[]]))
        assert fp.set_lists() == [[]]

    def test_empty_family_rejected(self, flat3):
        with pytest.raises(NotAFamily):
            f_poset(AntichainFamily(flat3, ()))

    def test_normalization_drops_subsets(self, flat3):
        fam = AntichainFamily.from_members(flat3, [[A], [A, B], [A, B]])
        assert fam.member_lists() == [[A, B]]

    def test_members_must_be_antichains(self):
        with pytest.raises(NotAFamily):
            AntichainFamily.from_members(Preorder.chain(2), [[0, 1]])

    def test_cap(self):
        big = Preorder.flat(13)
        with pytest.raises(SizeOverflow):
            f_poset(AntichainFamily.from_members(big, [range(13)]))

    def test_position(self, example_family):
        fp = f_poset(example_family)
        with pytest.raises(SetNotInFPoset):
            fp.position([A, C])

    def test_tech1_examples(self, example_family):
        fp = f_poset(example_family)
        P = fp.as_preorder
        a, b, c = fp.position([A]), fp.position([B]), fp.position([C])
        assert lemma_tech1_check(fp, [A], [C]) and not (P.down[a] & P.down[c])
        assert lemma_tech1_check(fp, [A], [B]) and P.down[a] & P.down[b]
        assert lemma_tech1_check(fp, [A, B], [A, B])


class TestTFamily:
    def test_example(self, example_family):
        T = t_family(example_family)
        assert len(T.members) == 3 and T.verified
        assert naive_antichain(T.product, T.members)

    def test_single_point(self, flat3):
        T = t_family(AntichainFamily.from_members(flat3, [[A]]))
        assert len(T.members) == 1 and T.verified

    def test_bottomed_base(self):
        P = bottomed(3)
        T = t_family(AntichainFamily.from_members(P, [[1], [2]]))
        assert T.verified and len(T.members) == 2


class TestWitnessFamily:
    def test_regenerates_example(self, flat3, example_family):
        T = t_family(example_family)
        fam = witness_family(flat3, T.fposet.as_preorder, T.members)
        assert fam.member_lists() == [[A, B], [B, C]]

    def test_singleton(self, flat3):
        Q = Preorder.chain(2)
        fam = witness_family(flat3, Q, [pair(2, B, 1)])
        assert fam.member_lists() == [[B]]

    def test_empty(self, flat3):
        assert witness_family(flat3, Preorder.chain(2), []).members == ()

    def test_rejects_non_antichain(self):
        P = Preorder.chain(2)
        with pytest.raises(NotAnAntichain):
            witness_family(P, P, [0, 3])


class TestMonotone:
    def test_identity_and_constant(self):
        P = Preorder.from_pairs(3, [(0, 1)], auto_close=True)
        assert is_monotone_surjection(MonotoneMap(P, P, (0, 1, 2)))
        assert is_monotone_surjection(MonotoneMap(P, Preorder.chain(1), (0, 0, 0)))

    def test_flat_into_chain(self):
        assert is_monotone_surjection(MonotoneMap(Preorder.flat(2), Preorder.chain(2), (0, 1)))

    def test_order_reversal_not_monotone(self):
        assert not is_monotone(MonotoneMap(Preorder.chain(2), Preorder.chain(2), (1, 0)))


class TestPullback:
    def test_identity(self):
        P, R = Preorder.flat(3), Preorder.chain(1)
        assert pullback_antichain(MonotoneMap(P, P, (0, 1, 2)), R, [0, 2]) == (0, 2)

    def test_to_one_point(self):
        m = MonotoneMap(Preorder.flat(3), Preorder.chain(1), (0, 0, 0))
        assert len(pullback_antichain(m, Preorder.chain(1), [0])) == 1

    def test_two_to_one(self):
        src, tgt = Preorder.flat(4), Preorder.flat(2)
        m = MonotoneMap(src, tgt, (0, 0, 1, 1))
        lifted = pullback_antichain(m, Preorder.chain(1), [0, 1])
        assert lifted == (0, 2) and naive_antichain(src, lifted)

    def test_preconditions(self):
        c2 = Preorder.chain(2)
        with pytest.raises(PreconditionUnmet):
            pullback_antichain(MonotoneMap(c2, c2, (1, 0)), Preorder.chain(1), [0])
        with pytest.raises(NotSurjective):
            pullback_antichain(MonotoneMap(c2, c2, (0, 0)), Preorder.chain(1), [0])
        with pytest.raises(NotAnAntichain):
            pullback_antichain(MonotoneMap(c2, c2, (0, 1)), Preorder.chain(1), [0, 1])

    @settings(max_examples=40, deadline=None)
    @given(preorders(4), preorders(3))
    def test_projection_lifts_every_maximum_antichain(self, P, R):
        Q = Preorder.chain(2)
        proj = projection(P, Q)
        W = cellularity(product(P, R))[1]
        lifted = pullback_antichain(proj, R, W)
        assert len(lifted) == len(W)
        assert is_antichain(product(product(P, Q), R), lifted)
