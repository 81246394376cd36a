"""Strong similarity and the graded tuple equivalences.

``str_similar`` compares quantifier-free types in the language of prefix
order, meet and lexicographic order.  In a tree the pairwise meets of a tuple
are already closed under meet, so the type is pinned down by a finite profile
of the positional closure: equality, prefix and lex patterns plus the meet
table.  ``graded_equiv`` checks the cumulative clause lists for the three
coarser relations used to build indiscernible witnesses of SOP1.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .report import CheckReport
from .treecore import (
    Node,
    comparable,
    is_meet_closed,
    is_prefix,
    meet,
    meet_closure_tuple,
)


class SimilarityLevel(enum.Enum):
    STR = "str"
    ALPHA = "alpha"
    BETA = "beta"
    GAMMA = "gamma"


@dataclass(frozen=True)
class TypeProfile:
    closure: tuple[Node, ...]
    eq_matrix: tuple[tuple[bool, ...], ...]
    relate_matrix: tuple[tuple[bool, ...], ...]   # closure[i] is a prefix of closure[j]
    lex_matrix: tuple[tuple[bool, ...], ...]
    meet_table: tuple[tuple[int, ...], ...]
    succ01_flags: tuple[tuple[tuple[bool, bool], ...], ...]
    immediate_succ: tuple[tuple[tuple[bool, bool], ...], ...]
    last_symbol: tuple[int | None, ...]

    def signature(self) -> tuple:
        """The part of the profile that determines the quantifier-free type."""
        return (self.eq_matrix, self.relate_matrix, self.lex_matrix, self.meet_table)

    def to_json(self) -> dict:
        return {
            "closure": [list(x) for x in self.closure],
            "eq": [list(r) for r in self.eq_matrix],
            "prefix": [list(r) for r in self.relate_matrix],
            "lex": [list(r) for r in self.lex_matrix],
            "meet": [list(r) for r in self.meet_table],
            "succ01": [[list(c) for c in r] for r in self.succ01_flags],
            "immediate_succ": [[list(c) for c in r] for r in self.immediate_succ],
            "last_symbol": list(self.last_symbol),
        }


def type_profile(nodes: Sequence[Node]) -> TypeProfile:
    cl = meet_closure_tuple(nodes)
    n = len(cl)
    first = {}
    for i, x in enumerate(cl):
        first.setdefault(tuple(x), i)
    eq = tuple(tuple(cl[i] == cl[j] for j in range(n)) for i in range(n))
    pre = tuple(tuple(is_prefix(cl[i], cl[j]) for j in range(n)) for i in range(n))
    lex = tuple(tuple(tuple(cl[i]) < tuple(cl[j]) for j in range(n)) for i in range(n))
    mt = tuple(tuple(first[tuple(meet(cl[i], cl[j]))] for j in range(n)) for i in range(n))
    succ = tuple(
        tuple(tuple(is_prefix(tuple(cl[i]) + (d,), cl[j]) for d in (0, 1)) for j in range(n))
        for i in range(n)
    )
    imm = tuple(
        tuple(tuple(tuple(cl[i]) + (d,) == tuple(cl[j]) for d in (0, 1)) for j in range(n))
        for i in range(n)
    )
    last = tuple(x[-1] if x else None for x in cl)
    return TypeProfile(cl, eq, pre, lex, mt, succ, imm, last)


def str_similar(a: Sequence[Node], b: Sequence[Node]) -> bool:
    if len(a) != len(b):
        raise InputError(f"arity mismatch: {len(a)} vs {len(b)}")
    if not a:
        return True
    return type_profile(a).signature() == type_profile(b).signature()


@dataclass(frozen=True)
class GradedVerdict:
    equivalent: bool
    closure_failed: bool = False
    clause: str | None = None
    indices: tuple = ()

    def __bool__(self):
        return self.equivalent


def _pattern(xs: Sequence[Sequence[int]], i: int, j: int, clause: str) -> bool:
    x, y = tuple(xs[i]), tuple(xs[j])
    if clause == "ii":
        return is_prefix(x, y)
    if clause == "iii0":
        return is_prefix(x + (0,), y)
    if clause == "iii1":
        return is_prefix(x + (1,), y)
    if clause == "iv":
        return x + (1,) == y
    if clause == "v":
        return x + (0,) == y
    raise AssertionError(clause)


_PAIR_CLAUSES = {
    SimilarityLevel.ALPHA: ("ii", "iii0", "iii1"),
    SimilarityLevel.BETA: ("ii", "iii0", "iii1", "iv"),
    SimilarityLevel.GAMMA: ("ii", "iii0", "iii1", "iv", "v"),
}


def graded_check(level: SimilarityLevel, a: Sequence[Node], b: Sequence[Node]) -> GradedVerdict:
    """Like :func:`graded_equiv` but says which clause failed."""
    if level not in _PAIR_CLAUSES:
        raise InputError(f"graded level expected, got {level}")
    if len(a) != len(b):
        raise InputError(f"arity mismatch: {len(a)} vs {len(b)}")
    for xs in (a, b):
        for x in xs:
            if any(s not in (0, 1) for s in x):
                raise InputError("graded equivalence is defined on binary nodes only")
    if not (is_meet_closed(a) and is_meet_closed(b)):
        return GradedVerdict(False, closure_failed=True, clause="i")
    n = len(a)
    for clause in _PAIR_CLAUSES[level]:
        for i in range(n):
            for j in range(n):
                if _pattern(a, i, j, clause) != _pattern(b, i, j, clause):
                    return GradedVerdict(False, clause=clause[:3].rstrip("01"), indices=(i, j))
    if level is SimilarityLevel.GAMMA:
        for i in range(n):
            for d, clause in ((0, "vi"), (1, "vii")):
                ea = len(a[i]) > 0 and a[i][-1] == d
                eb = len(b[i]) > 0 and b[i][-1] == d
                if ea != eb:
                    return GradedVerdict(False, clause=clause, indices=(i,))
    return GradedVerdict(True)


def graded_equiv(level: SimilarityLevel, a: Sequence[Node], b: Sequence[Node]) -> bool:
    return graded_check(level, a, b).equivalent


def _minus(x: Sequence[int]) -> tuple[int, ...]:
    return tuple(x[:-1])


def check_remark34(a: Sequence[Node], b: Sequence[Node]) -> CheckReport:
    """Verify the derived facts that follow from gamma-equivalence.

    Clauses that mention the parent of an entry skip root entries; under
    gamma-equivalence a root entry can only face a root entry.
    """
    if not graded_equiv(SimilarityLevel.GAMMA, a, b):
        raise InputError("check_remark34 needs gamma-equivalent tuples")
    n = len(a)
    A = [tuple(x) for x in a]
    B = [tuple(x) for x in b]
    checked = 0
    for i in range(n):
        for j in range(n):
            mab = tuple(meet(a[i], a[j]))
            mbb = tuple(meet(b[i], b[j]))
            for k in range(n):
                checked += 1
                if (mab == A[k]) != (mbb == B[k]):
                    return CheckReport.fail("i", (i, j, k), checked=checked)
            for xs, side in ((A, "left"), (B, "right")):
                if not comparable(xs[i], xs[j]):
                    if tuple(meet(_minus(xs[i]), _minus(xs[j]))) != tuple(meet(xs[i], xs[j])):
                        return CheckReport.fail("iii", (side, i, j), checked=checked)
            if not A[j] or not B[j]:
                continue
            if not A[i] or not B[i]:
                for d in (0, 1):
                    if is_prefix(A[i] + (d,), _minus(A[j])) != is_prefix(B[i] + (d,), _minus(B[j])):
                        return CheckReport.fail("iv", (i, j, d), checked=checked)
                continue
            if is_prefix(_minus(A[i]), _minus(A[j])) != is_prefix(_minus(B[i]), _minus(B[j])):
                return CheckReport.fail("ii", (i, j), checked=checked)
            for d in (0, 1):
                if is_prefix(A[i] + (d,), _minus(A[j])) != is_prefix(B[i] + (d,), _minus(B[j])):
                    return CheckReport.fail("iv", (i, j, d), checked=checked)
                if is_prefix(_minus(A[i]) + (d,), _minus(A[j])) != is_prefix(
                    _minus(B[i]) + (d,), _minus(B[j])
                ):
                    return CheckReport.fail("v", (i, j, d), checked=checked)
    return CheckReport.ok(checked=checked)


def _random_node(rng: random.Random, max_len: int) -> tuple[int, ...]:
    return tuple(rng.randrange(2) for _ in range(rng.randint(0, max_len)))


def _relabel(rng: random.Random, closure: Sequence[tuple], max_stretch: int) -> dict:
    """Random successor-preserving, last-symbol-preserving relabeling.

    Each edge to ``x + (d,)`` becomes either ``+ (d,)`` or
    ``+ (d,) + tau + (d,)`` for a random word ``tau``.
    """
    image: dict[tuple, tuple] = {(): ()}

    def h(x: tuple) -> tuple:
        if x in image:
            return image[x]
        p = h(x[:-1])
        d = x[-1]
        if rng.random() < 0.5:
            y = p + (d,)
        else:
            y = p + (d,) + _random_node(rng, max_stretch) + (d,)
        image[x] = y
        return y

    return {x: h(x) for x in closure}


def random_gamma_pair(
    rng: random.Random, max_arity: int = 4, max_len: int = 4, max_stretch: int = 2, tries: int = 1000
) -> tuple[tuple[Node, ...], tuple[Node, ...]]:
    """A seeded random pair of gamma-equivalent meet-closed tuples."""
    for _ in range(tries):
        base = [_random_node(rng, max_len) for _ in range(rng.randint(1, max_arity))]
        cl = sorted({x[: _lcp(x, y)] for x in base for y in base})
        rng.shuffle(cl)
        h = _relabel(rng, cl, max_stretch)
        a = tuple(Node(x, 2) for x in cl)
        b = tuple(Node(h[x], 2) for x in cl)
        if graded_equiv(SimilarityLevel.GAMMA, a, b):
            return a, b
    raise InputError("could not generate a gamma-equivalent pair")


def _lcp(x: tuple, y: tuple) -> int:
    i = 0
    while i < len(x) and i < len(y) and x[i] == y[i]:
        i += 1
    return i
