import itertools
import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from treeprops.errors import InputError, ResourceError
from treeprops.treecore import Node, all_nodes, comparable, is_antichain, is_chain
from treeprops.treemaps import NamedTreeMap, is_bad_pair
from treeprops.witness import (
    ConsistencyOracle,
    GridOracle,
    Mode,
    Property,
    Shape,
    SolutionSetOracle,
    SubsetClass,
    check_property,
    check_tp2,
    classify_subset,
    find_bad_pair,
    find_pattern_depth2,
    oracle_from_json,
    parse_property,
    pull_back,
    random_solution_oracle,
    synthetic,
    verify_downward_closed,
)


def n(text):
    return Node.parse(text)


def ns(*texts):
    return [n(t) for t in texts]


def test_oracle_examples():
    assert synthetic("atp", 3).consistent(ns("0", "1"))
    assert not synthetic("atp", 3).consistent(ns("0", "01"))
    assert synthetic("chain", 3).consistent(ns("e", "0", "00"))
    with pytest.raises(InputError):
        synthetic("atp", 2).consistent(ns("000"))


def test_check_examples():
    assert check_property(synthetic("atp", 3), "atp", 3, "full")
    r = check_property(synthetic("atp", 2), "sop2", 2, "full")
    assert r.clause == "chain" and r.counterexample == ns("e", "0")
    inner = synthetic("atp", NamedTreeMap.of("sop1_from_at").image_length(3) + 1)
    assert check_property(pull_back(inner, "sop1_from_at", 3), "sop1", 3, "full")
    assert check_property(synthetic("free", 3), "ssop1", 3, "full")
    a = check_property(synthetic("chain", 3), parse_property("astr:sop2:0,1"), 3, "full")
    b = check_property(synthetic("chain", 3), "sop2", 3, "full")
    assert a and a.passed == b.passed


def test_failures_are_reported_as_failures():
    # a failing sub-report must not be mistaken for "no failure"
    for prop in ("sop2", "sop1", "tp1", "ktp1:2", "weak_ktp1:2"):
        assert not check_property(synthetic("atp", 3), prop, 3)
    assert not check_property(synthetic("free", 3), "sop2", 3)


def test_least_counterexample():
    r = check_property(synthetic("free", 3), "sop2", 3)
    assert r.clause == "incomparable-pair" and r.counterexample == ns("0", "10")


def test_full_mode_bound():
    with pytest.raises(ResourceError):
        check_property(synthetic("atp", 5), "atp", 5, "full")


def test_tp2_examples():
    m = NamedTreeMap.of("tp2_from_at", ns("00", "01", "10"))
    assert check_tp2(pull_back(synthetic("atp", 5), m), 3)
    r = check_tp2(GridOracle(3, lambda cells: True), 3)
    assert r.clause == "row"
    assert check_tp2(GridOracle(1, lambda cells: True), 1)
    assert not check_tp2(GridOracle(1, lambda cells: False), 1)
    with pytest.raises(ResourceError):
        check_tp2(GridOracle(6, lambda cells: True), 6)


def test_classify_examples():
    assert classify_subset(ns("e", "0", "00")) is SubsetClass.CHAIN
    assert classify_subset(ns("1", "01")) is SubsetClass.BAD_PAIR
    assert find_bad_pair(ns("1", "01"))[0] == ()
    assert classify_subset(ns("00", "10")) is SubsetClass.NEITHER


def test_pattern_examples():
    assert find_pattern_depth2(synthetic("atp", 4), Shape.SOP2) is None
    assert find_pattern_depth2(synthetic("chain", 4), Shape.ANTICHAIN) is None
    found = find_pattern_depth2(synthetic("chain", 3), Shape.SOP2)
    assert found == {p: Node(p) for p in found}
    assert find_pattern_depth2(synthetic("atp", 4), Shape.ANTICHAIN) is not None


@pytest.mark.parametrize("depth", [2, 3])
def test_pattern_none_at_small_depths(depth):
    assert find_pattern_depth2(synthetic("atp", depth), Shape.SOP2) is None
    assert find_pattern_depth2(synthetic("chain", depth), Shape.ANTICHAIN) is None


def test_taxonomy_exhaustive():
    atp, chain, free = (synthetic(r, 3) for r in ("atp", "chain", "free"))
    nodes = [tuple(x) for x in all_nodes(3)]
    for r in range(len(nodes) + 1):
        for xs in itertools.combinations(nodes, r):
            cls = classify_subset(xs)
            assert chain.consistent(xs) == (cls is SubsetClass.CHAIN or len(xs) <= 1 or is_chain(xs))
            assert free.consistent(xs) == (find_bad_pair(xs) is None)
            assert atp.consistent(xs) == is_antichain(xs)
            if cls is SubsetClass.CHAIN and len(set(xs)) > 1:
                assert not atp.consistent(xs)


@given(st.integers(0, 10**6))
def test_full_equals_reduced_on_solution_oracles(seed):
    o = random_solution_oracle(random.Random(seed), 3, 2)
    for prop in ("atp", "ssop1"):
        assert check_property(o, prop, 3, "full").passed == check_property(o, prop, 3, "reduced").passed


def test_full_equals_reduced_on_synthetic():
    for rule in ("atp", "chain", "free"):
        o = synthetic(rule, 3)
        for prop in ("atp", "ssop1"):
            assert check_property(o, prop, 3, "full").passed == check_property(o, prop, 3, "reduced").passed


@given(st.integers(0, 10**6), st.integers(2, 3))
def test_weak_ktp1_equals_astr(seed, k):
    o = random_solution_oracle(random.Random(seed), 3, 3)
    tup = ",".join(f"[{i}]" for i in range(k))
    a = check_property(o, f"weak_ktp1:{k}", 3).passed
    b = check_property(o, parse_property(f"astr:tp1:{tup}"), 3).passed
    assert a == b


@given(st.integers(0, 10**6))
def test_sop2_equals_astr(seed):
    o = random_solution_oracle(random.Random(seed), 3, 3)
    assert check_property(o, "sop2", 3).passed == check_property(o, parse_property("astr:sop2:0,1"), 3).passed


@pytest.mark.parametrize("k", [2, 3])
def test_ktp1_equals_astr_over_antichains(k):
    nodes = all_nodes(3, 2)
    A = tuple(c for c in itertools.combinations(nodes, k) if is_antichain(c))
    prop = Property("astr", A=A, base="tp1")
    rng = random.Random(k)
    for _ in range(15):
        o = random_solution_oracle(rng, 3, 2)
        assert check_property(o, f"ktp1:{k}", 3).passed == check_property(o, prop, 3).passed


def test_pullback_preserves_downward_closure():
    for rule, m in (("atp", "sop1_from_at"), ("free", "at_from_ssop1"), ("atp", "ssop1_from_at")):
        mm = NamedTreeMap.of(m)
        o = pull_back(synthetic(rule, mm.image_length(3) + 1), mm, 3)
        assert verify_downward_closed(o, 3)


def test_pullback_depth_error_names_required_depth():
    need = NamedTreeMap.of("sop1_from_at").image_length(3) + 1
    with pytest.raises(InputError, match=f"needs inner depth >= {need}"):
        pull_back(synthetic("atp", need - 1), "sop1_from_at", 3)
    auto = pull_back(synthetic("atp", need), "sop1_from_at")
    assert auto.depth == 3


def test_downward_closure_negative_control():
    class Odd(ConsistencyOracle):
        depth, branching = 2, 2

        def _consistent(self, items):
            return len(items) != 1

    r = verify_downward_closed(Odd(), 2)
    assert not r


def test_json_round_trip():
    o = random_solution_oracle(random.Random(1), 3, 2)
    back = oracle_from_json(json.loads(json.dumps(o.to_json())))
    assert isinstance(back, SolutionSetOracle)
    for xs in itertools.combinations([tuple(x) for x in all_nodes(3)], 2):
        assert back.consistent(xs) == o.consistent(xs)
    pb = oracle_from_json({"kind": "pullback", "map": "sop1_from_at", "inner": {"kind": "synthetic", "rule": "atp", "depth": 8}})
    assert check_property(pb, "sop1", 3)
    with pytest.raises(InputError):
        oracle_from_json({"kind": "nope"})


@pytest.mark.parametrize("text", ["ktp1", "ktp1:1", "astr:sop1:0", "sop3", "astr:sop2:"])
def test_parse_property_rejects(text):
    with pytest.raises(InputError):
        parse_property(text)


def test_parse_property_forms():
    assert parse_property("ktp1:3") == Property("ktp1", k=3)
    assert parse_property("weak-ktp1:2").kind == "weak_ktp1"
    p = parse_property("astr:sop2:0,1;00,01")
    assert p.A == ((n("0"), n("1")), (n("00"), n("01")))


def test_solution_oracle_random_is_seeded():
    a = random_solution_oracle(random.Random(5), 3, 3).to_json()
    b = random_solution_oracle(random.Random(5), 3, 3).to_json()
    assert a == b
