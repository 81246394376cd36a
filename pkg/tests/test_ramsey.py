import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeprops.errors import InputError, ResourceError
from treeprops.ramsey import Coloring, find_dense_color, find_mono_embedding, is_monochromatic
from treeprops.treecore import Node, all_nodes, is_prefix


def brute_dense(c, margin):
    top = c.depth - 1 - margin
    ns = [tuple(x) for x in all_nodes(c.depth, c.branching)]
    colors = sorted({c(x) for x in ns})
    for nu in ns:
        if len(nu) > top:
            continue
        for col in colors:
            if all(
                any(is_prefix(eta, z) and c(z) == col for z in ns)
                for eta in ns
                if is_prefix(nu, eta) and len(eta) <= top
            ):
                return Node(nu, c.branching), col
    return None


def brute_mono_exists(c, height, tb):
    dom = [tuple(x) for x in all_nodes(height, tb)]
    cod = [tuple(x) for x in all_nodes(c.depth, c.branching)]
    for img in itertools.product(cod, repeat=len(dom)):
        h = dict(zip(dom, img))
        if len({c(y) for y in img}) > 1:
            continue
        if all(is_prefix(h[x[:-1]] + (x[-1],), h[x]) for x in dom if x):
            return True
    return False


colorings = st.builds(
    lambda depth, b, seed, k: Coloring.from_function(depth, b, lambda x, r=random.Random(seed): r.randrange(k)),
    st.integers(1, 4),
    st.integers(1, 3),
    st.integers(0, 10**6),
    st.integers(1, 3),
)


def test_parity_example():
    c = Coloring.from_function(4, 2, lambda x: len(x) % 2)
    # deepest level is all odd, so only color 1 survives without a margin
    assert find_dense_color(c) == (Node(()), 1)
    assert find_dense_color(c, margin=1) == (Node(()), 0)
    h = find_mono_embedding(c, 2)
    assert h is not None and is_monochromatic(c, h)


def test_constant_coloring():
    c = Coloring(3, 2, {}, default=2)
    assert find_dense_color(c) == (Node(()), 2)
    h = find_mono_embedding(c, 2)
    assert {x.bits(): y.bits() for x, y in h.items()} == {"e": "e", "0": "0", "1": "1"}


@settings(max_examples=60)
@given(colorings, st.integers(0, 2))
def test_dense_matches_brute(c, margin):
    assert find_dense_color(c, margin) == brute_dense(c, margin)


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_mono_existence_matches_brute(seed, k):
    r = random.Random(seed)
    c = Coloring.from_function(3, 2, lambda x: r.randrange(k + 1))
    h = find_mono_embedding(c, 2)
    assert (h is not None) == brute_mono_exists(c, 2, 2)
    if h is not None:
        assert is_monochromatic(c, h)
        for x, y in h.items():
            if len(x):
                assert is_prefix(tuple(h[Node(tuple(x)[:-1], 2)]) + (x[-1],), tuple(y))


def test_mono_deterministic():
    c = Coloring.from_function(5, 2, lambda x: (sum(x) + len(x)) % 2)
    a = find_mono_embedding(c, 3)
    b = find_mono_embedding(c, 3)
    assert a == b


def test_mono_budget():
    c = Coloring.from_function(6, 2, lambda x: hash(x) % 3)
    with pytest.raises(ResourceError):
        find_mono_embedding(c, 4, budget=50)


def test_mono_ternary_to_binary():
    c = Coloring.from_function(3, 3, lambda x: 0 if 2 not in x else 1)
    h = find_mono_embedding(c, 2, target_branching=2)
    assert h is not None and all(c(y) == 0 for y in h.values())
    with pytest.raises(InputError):
        find_mono_embedding(c, 2, target_branching=4)


def test_input_errors():
    with pytest.raises(InputError):
        Coloring(0)
    with pytest.raises(InputError):
        Coloring(2, 2, {"000": 1})
    with pytest.raises(InputError):
        find_dense_color(Coloring(2), margin=-1)
    with pytest.raises(InputError):
        find_mono_embedding(Coloring(2), 0)
    with pytest.raises(InputError):
        Coloring.from_json({"colors": {}})


def test_margin_beyond_depth():
    assert find_dense_color(Coloring(2), margin=2) is None


def test_json_round_trip():
    c = Coloring.from_function(3, 2, lambda x: sum(x))
    back = Coloring.from_json(json.loads(json.dumps(c.to_json())))
    assert back == c
    assert c.to_json()["colors"]["01"] == 1
