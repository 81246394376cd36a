import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeprops.fol import And, Eq, Exists, FiniteStructure, Not, Or, R, common_solver, exists, predecessor_formula


def brute(f, rel, size, env):
    if f.__class__.__name__ == "Rel":
        return bool(rel[tuple(env[a] for a in f.args)])
    if isinstance(f, Eq):
        return env[f.left] == env[f.right]
    if isinstance(f, Not):
        return not brute(f.body, rel, size, env)
    if isinstance(f, And):
        return all(brute(p, rel, size, env) for p in f.parts)
    if isinstance(f, Or):
        return any(brute(p, rel, size, env) for p in f.parts)
    if isinstance(f, Exists):
        return any(brute(f.body, rel, size, {**env, f.var: v}) for v in range(size))
    raise TypeError(f)


def check_against_brute(f, rel):
    size = rel.shape[0]
    s = FiniteStructure(size, {"R": rel})
    t = s.evaluate(f)
    for vals in itertools.product(range(size), repeat=len(t.vars)):
        env = dict(zip(t.vars, vals))
        assert t.data[vals] == brute(f, rel, size, env), (f, env)


relations = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.booleans(), min_size=n * n, max_size=n * n).map(lambda v: np.array(v).reshape(n, n))
)

FORMULAS = [
    R("x", "y"),
    R("x", "x"),
    Eq("x", "y"),
    Not(R("y", "x")),
    Or((R("x", "y"), R("y", "x"))),
    common_solver("x", "y"),
    exists("z", R("x", "z"), Not(R("z", "y")), R("y", "y")),
    exists("z", R("z", "z")),
    predecessor_formula(),
    predecessor_formula(exclude_self=True),
]


@pytest.mark.parametrize("f", FORMULAS, ids=range(len(FORMULAS)))
@settings(max_examples=40)
@given(relations)
def test_einsum_matches_brute(f, rel):
    check_against_brute(f, rel)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        FiniteStructure(3, {"R": np.zeros((3, 2), dtype=bool)})


def test_literal_predecessor_has_trivial_witness():
    # z = x always works in the literal form, so only the outer conjuncts matter
    rel = np.array([[1, 0], [0, 1]], dtype=bool)
    s = FiniteStructure(2, {"R": rel})
    lit = s.evaluate(predecessor_formula()).data
    strict = s.evaluate(predecessor_formula(exclude_self=True)).data
    outer = s.evaluate(And((Not(Eq("x", "y")), Not(common_solver("x", "y"))))).data
    assert (lit == outer).all()
    assert not strict.any()


def test_free_variables():
    assert predecessor_formula("a", "b").free() == {"a", "b"}
    assert exists("z", R("x", "z")).free() == {"x"}
