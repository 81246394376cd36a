import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import node_tuples, nodes
from treeprops.acceptance import brute_maximal_antichains
from treeprops.errors import InputError, ResourceError
from treeprops.treecore import (
    Node,
    Relation,
    all_nodes,
    enumerate_maximal_antichains,
    gen_K,
    gen_O,
    is_antichain,
    is_maximal_antichain,
    is_meet_closed,
    is_prefix,
    lex_less,
    maximal_antichain_count,
    meet,
    meet_closure,
    node,
    relate,
)


def n(text):
    return Node.parse(text)


def ns(*texts):
    return [n(t) for t in texts]


class TestNode:
    def test_parse_forms(self):
        assert n("e") == ()
        assert n("011") == (0, 1, 1)
        assert Node.parse("[0,2,1]") == (0, 2, 1)
        assert node([1, 0]) == (1, 0)

    def test_bits_round_trip(self):
        for x in all_nodes(4, 2):
            assert Node.parse(x.bits()) == x
        assert Node((0, 2, 1), 3).bits() == "[0,2,1]" or Node((0, 2, 1), 3).bits() == "021"

    @pytest.mark.parametrize("bad", ["0a1", "[0,x]", "[0,1", "2"])
    def test_parse_rejects(self, bad):
        with pytest.raises(InputError):
            Node.parse(bad, 2)

    def test_branching_is_metadata(self):
        assert Node((0, 1), 2) == Node((0, 1), 5)
        assert hash(Node((0, 1), 2)) == hash((0, 1))

    def test_root_has_no_parent(self):
        with pytest.raises(InputError):
            Node(()).parent
        assert n("01").parent == n("0")


class TestRelations:
    def test_relate_examples(self):
        assert relate(n("0"), n("01")) is Relation.PREFIX
        assert relate(n("01"), n("01")) is Relation.EQ
        assert relate(n("01"), n("001")) is Relation.INCOMPARABLE
        assert relate(n("01"), n("0")) is Relation.EXTENSION

    def test_relate_rejects_mismatched_bounds(self):
        with pytest.raises(InputError):
            relate(Node((0,), 2), Node((0,), 3))

    def test_meet_examples(self):
        assert meet(n("010"), n("0110")) == n("01")
        assert meet(n("0110"), n("0110")) == n("0110")
        assert meet(n("e"), n("1101")) == ()

    def test_lex_examples(self):
        assert lex_less(n("0"), n("01"))
        assert lex_less(n("01"), n("1"))
        assert not lex_less(n("1"), n("01"))

    def test_meet_closure_examples(self):
        assert meet_closure(ns("00", "01", "1")) == tuple(ns("e", "0", "00", "01", "1"))
        assert meet_closure(ns("0")) == tuple(ns("0"))
        assert meet_closure(ns("0", "01")) == tuple(ns("0", "01"))
        with pytest.raises(InputError):
            meet_closure(())

    def test_antichain_examples(self):
        assert is_antichain(ns("0", "1"))
        assert not is_antichain(ns("0", "01"))
        assert is_antichain([])

    def test_maximal_antichain_examples(self):
        assert is_maximal_antichain(ns("e"), 2)
        assert not is_maximal_antichain(ns("0"), 2)
        assert is_maximal_antichain(ns("0", "10", "11"), 3)
        with pytest.raises(InputError):
            is_maximal_antichain(ns("000"), 3)

    @given(nodes(), nodes(), nodes())
    def test_meet_laws(self, a, b, c):
        m = meet(a, b)
        assert m == meet(b, a)
        assert meet(meet(a, b), c) == meet(a, meet(b, c))
        assert meet(a, a) == a
        assert is_prefix(m, a) and is_prefix(m, b)
        # greatest common lower bound
        if is_prefix(c, a) and is_prefix(c, b):
            assert is_prefix(c, m)

    @given(nodes(), nodes(), nodes())
    def test_lex_is_strict_total_order(self, a, b, c):
        if a != b:
            assert lex_less(a, b) != lex_less(b, a)
        assert not lex_less(a, a)
        if lex_less(a, b) and lex_less(b, c):
            assert lex_less(a, c)
        if is_prefix(a, b) and a != b:
            assert lex_less(a, b)

    @given(nodes(), nodes(), nodes())
    def test_prefix_is_partial_order(self, a, b, c):
        if relate(a, b) in (Relation.EQ, Relation.PREFIX) and relate(b, a) in (Relation.EQ, Relation.PREFIX):
            assert a == b
        if is_prefix(a, b) and is_prefix(b, c):
            assert is_prefix(a, c)

    @given(node_tuples(max_size=5))
    def test_closure_is_meet_closed(self, xs):
        cl = meet_closure(xs)
        assert is_meet_closed(cl)
        assert set(xs) <= set(cl)


class TestCatalog:
    def test_small_counts(self):
        assert [len(enumerate_maximal_antichains(k)) for k in (1, 2, 3, 4, 5)] == [1, 2, 5, 26, 677]
        assert enumerate_maximal_antichains(1).entries == ((n("e"),),)

    @pytest.mark.parametrize("depth", [1, 2, 3])
    def test_matches_subset_scan(self, depth):
        assert len(enumerate_maximal_antichains(depth)) == brute_maximal_antichains(depth)

    def test_sets_match_exhaustive_scan_depth3(self):
        all3 = [tuple(x) for x in all_nodes(3)]
        brute = {
            frozenset(s)
            for r in range(1, 8)
            for s in itertools.combinations(all3, r)
            if is_maximal_antichain(s, 3)
        }
        assert {frozenset(map(tuple, a)) for a in enumerate_maximal_antichains(3)} == brute

    def test_birthday_order_depth3(self):
        got = [[x.bits() for x in a] for a in enumerate_maximal_antichains(3)]
        assert got == [["e"], ["0", "1"], ["0", "10", "11"], ["00", "01", "1"], ["00", "01", "10", "11"]]

    def test_recursion(self):
        for k in range(1, 5):
            assert maximal_antichain_count(k + 1) == maximal_antichain_count(k) ** 2 + 1

    def test_birthday_stability(self):
        big = enumerate_maximal_antichains(5)
        for m in range(1, 5):
            small = enumerate_maximal_antichains(m)
            assert big.entries[: len(small)] == small.entries

    def test_maximal_at_smaller_depth_stays_maximal(self):
        for m in range(1, 5):
            for k in range(m, 5):
                for a in enumerate_maximal_antichains(m):
                    assert is_maximal_antichain(a, k)

    def test_entries_valid_and_distinct(self):
        cat = enumerate_maximal_antichains(4)
        assert len(set(cat.entries)) == len(cat)
        assert all(is_maximal_antichain(a, 4) for a in cat)
        assert cat.index(cat[7]) == 7

    def test_bound(self):
        with pytest.raises(ResourceError):
            enumerate_maximal_antichains(7)


class TestGenerators:
    def test_gen_O_examples(self):
        assert set(gen_O(n("1"), 3)) == set(ns("1", "10", "100"))
        assert set(gen_O(n("e"), 1)) == {()}
        assert gen_O(n("01"), 0) == ()

    def test_gen_K_examples(self):
        assert set(gen_K(n("e"), 2, 1, 2)) == set(ns("0", "00", "1", "10"))
        assert set(gen_K(n("1"), 2, 0, 1)) == set(ns("1"))
        assert set(gen_K(Node(()), 3, 1, 1)) == {(0,), (1,), (2,)}

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 3), nodes(3))
    def test_gen_K_size(self, k, m, alpha, eta):
        assert len(set(gen_K(eta, k, m, alpha))) == k**m * alpha
