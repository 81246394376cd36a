import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeprops import kernels
from treeprops.modelc import build_structure, conjunction_search_inputs

needs_compiled = pytest.mark.skipif(not kernels.compiled_available(), reason="compiled kernels not built")
BACKENDS = ["python"] + (["cython"] if kernels.compiled_available() else [])


@st.composite
def scan_inputs(draw, max_items=8, max_solvers=70):
    m = draw(st.integers(0, max_items))
    width = draw(st.integers(1, max_solvers))
    full = (1 << width) - 1
    masks = [draw(st.integers(0, full)) for _ in range(m)]
    forbid = [0] * m
    for i, j in itertools.combinations(range(m), 2):
        if draw(st.booleans()):
            forbid[i] |= 1 << j
            forbid[j] |= 1 << i
    return masks, forbid, full


def brute_first_mismatch(masks, forbid, full):
    for s in range(1 << len(masks)):
        idx = [i for i in range(len(masks)) if s >> i & 1]
        acc = full
        for i in idx:
            acc &= masks[i]
        free = all(not (forbid[i] >> j & 1) for i, j in itertools.combinations(idx, 2))
        if (acc != 0) != free:
            return s
    return -1


def brute_unsolvable_free_set(masks, forbid, max_size, full):
    for k in range(max_size + 1):
        for idx in itertools.combinations(range(len(masks)), k):
            if any(forbid[i] >> j & 1 for i, j in itertools.combinations(idx, 2)):
                continue
            acc = full
            for i in idx:
                acc &= masks[i]
            if acc == 0:
                return True
    return False


@pytest.mark.parametrize("name", BACKENDS)
@given(scan_inputs())
def test_full_scan_matches_brute(name, inp):
    masks, forbid, full = inp
    s, _ = kernels.backend(name).full_subset_scan(masks, forbid, full)
    assert s == brute_first_mismatch(masks, forbid, full)


@pytest.mark.parametrize("name", BACKENDS)
@given(scan_inputs(), st.integers(0, 4))
def test_independent_scan_matches_brute(name, inp, max_size):
    masks, forbid, full = inp
    found, _ = kernels.backend(name).independent_sets_scan(masks, forbid, max_size, full)
    assert (found is not None) == brute_unsolvable_free_set(masks, forbid, max_size, full)
    if found is not None:
        assert len(found) <= max_size or found == ()
        acc = full
        for i in found:
            acc &= masks[i]
        assert acc == 0


@needs_compiled
@given(scan_inputs(max_items=10, max_solvers=200))
def test_backends_agree_on_scans(inp):
    masks, forbid, full = inp
    py, cy = kernels.backend("python"), kernels.backend("cython")
    assert py.full_subset_scan(masks, forbid, full) == cy.full_subset_scan(masks, forbid, full)
    for k in range(4):
        assert py.independent_sets_scan(masks, forbid, k, full) == cy.independent_sets_scan(masks, forbid, k, full)


PARENT = (-1, 0, 1, 1, 0, 4, 4)


def brute_conj(cand, pair_ok, incomp):
    npos = len(PARENT)
    for choice in itertools.product(range(len(cand)), repeat=npos):
        acc = [0] * npos
        ok = True
        for p, c in enumerate(choice):
            acc[p] = (acc[PARENT[p]] if PARENT[p] >= 0 else -1) & cand[c]
            if acc[p] == 0 or any(incomp[p][q] and pair_ok[c][choice[q]] for q in range(p)):
                ok = False
                break
        if ok:
            return choice
    return None


@st.composite
def conj_inputs(draw):
    nc = draw(st.integers(1, 4))
    cand = [draw(st.integers(0, 255)) for _ in range(nc)]
    pair_ok = np.array([[1 if a & b else 0 for b in cand] for a in cand], dtype=np.uint8)
    _, _, _, incomp = conjunction_search_inputs(build_structure(1), 1)
    return cand, pair_ok, incomp


@pytest.mark.parametrize("name", BACKENDS)
@settings(max_examples=40)
@given(conj_inputs())
def test_conj_search_matches_brute(name, inp):
    cand, pair_ok, incomp = inp
    res = kernels.backend(name).conj_sop2_search(cand, pair_ok, PARENT, incomp, 10**7)
    expect = brute_conj(cand, pair_ok, incomp.tolist())
    assert (res.status == kernels.STATUS_WITNESS) == (expect is not None)
    if expect is not None:
        assert res.witness == expect


@needs_compiled
@pytest.mark.parametrize("n,n_conj", [(3, 1), (3, 2), (4, 1)])
def test_backends_agree_on_conj_search(n, n_conj):
    _, cand, pair_ok, incomp = conjunction_search_inputs(build_structure(n), n_conj)
    py = kernels.backend("python").conj_sop2_search(cand, pair_ok, PARENT, incomp, 10**7)
    cy = kernels.backend("cython").conj_sop2_search(cand, pair_ok, PARENT, incomp, 10**7)
    assert py == cy


@pytest.mark.parametrize("name", BACKENDS)
def test_conj_search_budget(name):
    _, cand, pair_ok, incomp = conjunction_search_inputs(build_structure(3), 1)
    res = kernels.backend(name).conj_sop2_search(cand, pair_ok, PARENT, incomp, 5)
    assert res.status == kernels.STATUS_BUDGET and res.witness == ()


def test_full_scan_size_limit():
    with pytest.raises(ValueError):
        kernels.full_subset_scan([1] * 25, [0] * 25, 1)


def test_pure_env_forces_python():
    code = "from treeprops import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, TREEPROPS_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_compiled
def test_unforced_uses_compiled():
    assert kernels.BACKEND == "cython"
