"""Pure-Python kernels; same contract as the compiled ``_kernels`` module.

Solver sets are Python ints used as bitsets.  ``forbid[i]`` is the bitset of
indices that may not appear together with ``i``.
"""
from __future__ import annotations

from typing import Sequence

STATUS_NONE = 0
STATUS_WITNESS = 1
STATUS_BUDGET = 2


def full_subset_scan(masks: Sequence[int], forbid: Sequence[int], full: int) -> tuple[int, int]:
    """Scan every subset ``S`` of ``range(len(masks))`` by bitmask order.

    Returns ``(S, scanned)`` for the first ``S`` where "common solver
    exists" differs from "no forbidden pair", or ``(-1, scanned)``.  ``full``
    is the all-solvers bitset used for the empty intersection.
    """
    m = len(masks)
    size = 1 << m
    acc = [0] * size
    indep = bytearray(size)
    acc[0] = full
    indep[0] = 1
    for s in range(1, size):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        a = acc[rest] & masks[low]
        acc[s] = a
        ind = indep[rest] and not (forbid[low] & rest)
        indep[s] = 1 if ind else 0
        if (a != 0) != bool(ind):
            return s, s + 1
    return -1, size


def independent_sets_scan(
    masks: Sequence[int], forbid: Sequence[int], max_size: int, full: int
) -> tuple[tuple[int, ...] | None, int]:
    """Depth-first walk over forbidden-pair-free sets of size ``<= max_size``.

    Returns the first such set with no common solver, or ``None``, plus the
    number of sets visited.
    """
    m = len(masks)
    visited = 1
    if full == 0:
        return (), visited
    if max_size <= 0:
        return None, visited
    nxt = [0] * (max_size + 1)
    chosen = [0] * (max_size + 1)
    members = [0] * (max_size + 1)
    acc = [0] * (max_size + 1)
    acc[0] = full
    depth = 0
    while depth >= 0:
        j = nxt[depth]
        if depth >= max_size or j >= m:
            depth -= 1
            continue
        nxt[depth] = j + 1
        if forbid[j] & members[depth]:
            continue
        visited += 1
        a = acc[depth] & masks[j]
        acc[depth + 1] = a
        chosen[depth] = j
        if a == 0:
            return tuple(chosen[: depth + 1]), visited
        members[depth + 1] = members[depth] | (1 << j)
        nxt[depth + 1] = j + 1
        depth += 1
    return None, visited


def conj_sop2_search(
    cand: Sequence[int],
    pair_ok: Sequence[Sequence[int]],
    parent: Sequence[int],
    incomp: Sequence[Sequence[int]],
    budget: int,
) -> tuple[int, tuple[int, ...], int]:
    """Backtracking search for a height-two SOP2 assignment.

    Positions are visited in the given order; ``parent[p]`` is the index of
    the parent position (``-1`` for the root).  A candidate at ``p`` must keep
    the running intersection along its root path nonempty and must have no
    common solver with any earlier position incomparable to ``p``.
    """
    npos = len(parent)
    nc = len(cand)
    earlier_incomp = [[q for q in range(p) if incomp[p][q]] for p in range(npos)]
    choice = [0] * npos
    acc = [0] * npos
    steps = 0

    def place(p: int) -> bool:
        nonlocal steps
        if p == npos:
            return True
        par = parent[p]
        base = acc[par] if par >= 0 else -1
        bad = earlier_incomp[p]
        for c in range(nc):
            steps += 1
            if steps > budget:
                raise _Budget
            a = base & cand[c]
            if a == 0:
                continue
            row = pair_ok[c]
            if any(row[choice[q]] for q in bad):
                continue
            choice[p] = c
            acc[p] = a
            if place(p + 1):
                return True
        return False

    try:
        found = place(0)
    except _Budget:
        return STATUS_BUDGET, (), steps
    if found:
        return STATUS_WITNESS, tuple(choice), steps
    return STATUS_NONE, (), steps


class _Budget(Exception):
    pass
