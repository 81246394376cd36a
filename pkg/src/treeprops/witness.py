"""Consistency oracles and finite-depth checkers for tree witness patterns.

An oracle answers "does this finite set of nodes index a consistent family".
Checkers quantify over the nodes of length below a depth and report the
least counterexample in (size, lexicographic) order.
"""
from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import networkx as nx

from . import kernels
from .errors import InputError, ResourceError
from .report import CheckReport
from .similarity import type_profile
from .treecore import (
    Node,
    all_nodes,
    branch_chain,
    comparable,
    enumerate_maximal_antichains,
    is_antichain,
    is_chain,
    leaves,
)
from .treemaps import MapName, NamedTreeMap, apply_map, is_bad_pair

FULL_SUBSET_BOUND = 1 << 15
PATTERN_NODE_BOUND = 63
TP2_BOUND = 5
ASTR_ARITY_CAP = 4


class Rule(enum.Enum):
    ATP = "atp"
    CHAIN = "chain"
    FREE = "free"


class Mode(enum.Enum):
    FULL = "full"
    REDUCED = "reduced"


def contains_bad_pair(xs: Iterable[Sequence[int]]) -> bool:
    items = [tuple(x) for x in xs]
    return any(is_bad_pair(a, b) for a, b in itertools.combinations(items, 2))


class ConsistencyOracle:
    depth: int
    branching: int

    def consistent(self, xs: Iterable[Sequence[int]]) -> bool:
        items = {tuple(x) for x in xs}
        for x in items:
            self._check_node(x)
        return self._consistent(frozenset(items))

    def _consistent(self, items: frozenset) -> bool:
        raise NotImplementedError

    def _check_node(self, x: tuple) -> None:
        if len(x) >= self.depth:
            raise InputError(f"node {Node(x)} outside oracle depth {self.depth}")
        if any(not 0 <= s < self.branching for s in x):
            raise InputError(f"node {Node(x)} outside branching {self.branching}")

    def solver_bits(self, nodes: Sequence[tuple]) -> tuple[list[int], int] | None:
        """Bitset view for the compiled kernels, when the oracle has one."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass
class SolutionSetOracle(ConsistencyOracle):
    """``consistent(X)`` iff the solver sets of the members of X intersect."""

    depth: int
    branching: int
    solutions: Mapping[tuple, frozenset]
    universe: frozenset = field(default=frozenset())

    def __post_init__(self):
        sol = {}
        for k, v in self.solutions.items():
            k = tuple(k)
            self._check_node(k)
            sol[k] = frozenset(int(s) for s in v)
        self.solutions = sol
        if not self.universe:
            self.universe = frozenset().union(*sol.values()) if sol else frozenset()
        ids = sorted(self.universe)
        self._bit = {s: i for i, s in enumerate(ids)}
        self._mask = {k: sum(1 << self._bit[s] for s in v) for k, v in sol.items()}
        self._full = (1 << len(ids)) - 1

    def mask(self, x: tuple) -> int:
        return self._mask.get(tuple(x), 0)

    def _consistent(self, items: frozenset) -> bool:
        acc = self._full
        for x in items:
            acc &= self._mask.get(x, 0)
            if not acc:
                return False
        return True

    def solver_bits(self, nodes):
        return [self.mask(x) for x in nodes], self._full

    def to_json(self) -> dict:
        return {
            "kind": "solution_set",
            "depth": self.depth,
            "branching": self.branching,
            "solutions": {Node(k).bits(): sorted(v) for k, v in sorted(self.solutions.items())},
        }


@dataclass
class SyntheticOracle(ConsistencyOracle):
    rule: Rule
    depth: int
    branching: int = 2

    def _consistent(self, items: frozenset) -> bool:
        if self.rule is Rule.ATP:
            return is_antichain(items)
        if self.rule is Rule.CHAIN:
            return is_chain(items)
        return not contains_bad_pair(items)

    def to_json(self) -> dict:
        return {"kind": "synthetic", "rule": self.rule.value, "depth": self.depth}


@dataclass
class PullbackOracle(ConsistencyOracle):
    inner: ConsistencyOracle
    tree_map: NamedTreeMap | None
    depth: int
    branching: int = 2

    def image(self, x: tuple) -> tuple:
        if self.tree_map is None:
            return x
        return tuple(apply_map(self.tree_map, x))

    def _consistent(self, items: frozenset) -> bool:
        return self.inner.consistent(self.image(x) for x in items)

    def to_json(self) -> dict:
        return {
            "kind": "pullback",
            "map": self.tree_map.name.value if self.tree_map else "identity",
            "depth": self.depth,
            "inner": self.inner.to_json(),
        }


@dataclass
class GridOracle:
    """Consistency on cells ``(i, j)`` of an ``m x m`` array."""

    m: int
    fn: Callable[[frozenset], bool]

    def consistent(self, cells: Iterable[tuple[int, int]]) -> bool:
        cs = frozenset((int(i), int(j)) for i, j in cells)
        for i, j in cs:
            if not (0 <= i < self.m and 0 <= j < self.m):
                raise InputError(f"cell ({i}, {j}) outside {self.m}x{self.m} grid")
        return self.fn(cs)


def oracle_consistent(o: ConsistencyOracle, xs: Iterable[Sequence[int]]) -> bool:
    return o.consistent(xs)


def synthetic(rule: str | Rule, depth: int, branching: int = 2) -> SyntheticOracle:
    if isinstance(rule, str):
        try:
            rule = Rule(rule.lower())
        except ValueError:
            raise InputError(f"unknown rule {rule!r}") from None
    if rule is not Rule.CHAIN and branching != 2:
        raise InputError("atp and free rules are defined on the binary tree")
    return SyntheticOracle(rule, depth, branching)


def _max_pullback_depth(m: NamedTreeMap, inner_depth: int) -> int:
    d = 0
    while d < 32 and m.image_length(d + 1) < inner_depth:
        d += 1
    return d


def pull_back(
    o: ConsistencyOracle, m: NamedTreeMap | str | None, depth: int | None = None
) -> PullbackOracle | GridOracle:
    """Precompose the oracle with a tree map.

    Without ``depth`` the result gets the largest depth whose images fit in
    ``o``.  A grid map yields a :class:`GridOracle`.
    """
    if isinstance(m, str):
        m = None if m == "identity" else NamedTreeMap.of(m)
    if m is not None and m.name is MapName.TP2_FROM_AT:
        need = m.image_length(0) + 1
        if need > o.depth:
            raise InputError(f"grid images need inner depth >= {need}, oracle has {o.depth}")
        return GridOracle(len(m.antichain), lambda cells: o.consistent(apply_map(m, c) for c in cells))
    if m is None:
        d = o.depth if depth is None else depth
        if d > o.depth:
            raise InputError(f"identity pullback depth {d} exceeds inner depth {o.depth}")
        return PullbackOracle(o, None, d, o.branching)
    if o.branching != 2:
        raise InputError("tree maps act on the binary tree")
    if depth is None:
        depth = _max_pullback_depth(m, o.depth)
        if depth == 0:
            raise InputError(f"inner depth {o.depth} too small for {m.name.value}")
    else:
        need = m.image_length(depth) + 1
        if need > o.depth:
            raise InputError(
                f"{m.name.value} at depth {depth} needs inner depth >= {need}, oracle has {o.depth}"
            )
    return PullbackOracle(o, m, depth, 2)


@dataclass(frozen=True)
class Property:
    kind: str
    k: int | None = None
    A: tuple[tuple[Node, ...], ...] = ()
    base: str = "sop2"

    def label(self) -> str:
        if self.kind in ("ktp1", "weak_ktp1"):
            return f"{self.kind}:{self.k}"
        if self.kind == "astr":
            return f"astr-{self.base}"
        return self.kind


KINDS = ("sop2", "sop1", "ssop1", "atp", "tp1", "ktp1", "weak_ktp1", "tp2", "astr")


def parse_property(text: str) -> Property:
    """``sop1``, ``ktp1:3``, ``weak_ktp1:2`` or ``astr:sop2:0,1;00,01``."""
    t = text.strip().lower().replace("-", "_")
    head, _, rest = t.partition(":")
    if head in ("ktp1", "weak_ktp1"):
        try:
            k = int(rest)
        except ValueError:
            raise InputError(f"{head} needs an integer k, e.g. {head}:2") from None
        if k < 2:
            raise InputError("k must be at least 2")
        return Property(head, k=k)
    if head == "astr":
        base, _, tuples = rest.partition(":")
        if base not in ("sop2", "tp1") or not tuples:
            raise InputError("astr syntax: astr:<sop2|tp1>:<n,n,...>;<n,...>")
        A = tuple(tuple(Node.parse(x, None) for x in tup.split(",")) for tup in tuples.split(";"))
        return Property("astr", A=A, base=base)
    if head in KINDS and not rest:
        return Property(head)
    raise InputError(f"unknown property {text!r}")


def _nodes(o: ConsistencyOracle, depth: int) -> list[tuple]:
    return [tuple(x) for x in all_nodes(depth, o.branching)]


def _chains_ok(o: ConsistencyOracle, depth: int, stats: dict) -> CheckReport | None:
    for leaf in leaves(depth, o.branching):
        stats["sets"] = stats.get("sets", 0) + 1
        ch = branch_chain(leaf)
        if not o.consistent(ch):
            return CheckReport.fail("chain", ch, **stats)
    return None


def _pairs_inconsistent(o, depth, pred, clause, stats) -> CheckReport | None:
    ns = _nodes(o, depth)
    for a, b in itertools.combinations(ns, 2):
        if pred(a, b):
            stats["sets"] = stats.get("sets", 0) + 1
            if o.consistent((a, b)):
                return CheckReport.fail(clause, [Node(a), Node(b)], **stats)
    return None


def _ksets_inconsistent(o, depth, k, pred, clause, stats) -> CheckReport | None:
    ns = _nodes(o, depth)
    for combo in itertools.combinations(ns, k):
        if pred(combo):
            stats["sets"] = stats.get("sets", 0) + 1
            if o.consistent(combo):
                return CheckReport.fail(clause, [Node(x) for x in combo], **stats)
    return None


def _pairwise_incomparable(xs) -> bool:
    return all(not comparable(a, b) for a, b in itertools.combinations(xs, 2))


def _common_fork(xs) -> bool:
    """All pairwise meets coincide: the k nodes leave one node through distinct children."""
    if not _pairwise_incomparable(xs):
        return False
    ms = set()
    for a, b in itertools.combinations(xs, 2):
        n = 0
        while a[n] == b[n]:
            n += 1
        ms.add(a[:n])
    return len(ms) == 1


def _forbid_rows(nodes: Sequence[tuple], bad: Callable[[tuple, tuple], bool]) -> list[int]:
    rows = [0] * len(nodes)
    for i, j in itertools.combinations(range(len(nodes)), 2):
        if bad(nodes[i], nodes[j]):
            rows[i] |= 1 << j
            rows[j] |= 1 << i
    return rows


def _full_equivalence(
    o: ConsistencyOracle, depth: int, pair_bad: Callable[[tuple, tuple], bool], clause: str, stats: dict
) -> CheckReport:
    """For every subset X: consistent(X) iff X has no forbidden pair."""
    ns = _nodes(o, depth)
    if (1 << len(ns)) > FULL_SUBSET_BOUND:
        raise ResourceError(f"full mode needs 2^{len(ns)} subsets; bound is {FULL_SUBSET_BOUND}")
    bits = o.solver_bits(ns)
    if bits is not None:
        masks, full = bits
        first, scanned = kernels.full_subset_scan(masks, _forbid_rows(ns, pair_bad), full)
        stats["sets"] = scanned
        stats["backend"] = kernels.BACKEND
        if first < 0:
            return CheckReport.ok(**stats)
    # least counterexample in (size, lex) order
    count = 0
    for k in range(len(ns) + 1):
        for combo in itertools.combinations(ns, k):
            count += 1
            free = not any(pair_bad(a, b) for a, b in itertools.combinations(combo, 2))
            if o.consistent(combo) != free:
                stats.setdefault("sets", count)
                return CheckReport.fail(
                    clause, {"set": [Node(x) for x in combo], "consistent": not free}, **stats
                )
    stats["sets"] = count
    return CheckReport.ok(**stats)


def _check_atp(o, depth, mode, stats) -> CheckReport:
    if mode is Mode.FULL:
        return _full_equivalence(o, depth, comparable, "antichain-equivalence", stats)
    if o.branching != 2:
        raise InputError("atp is defined on the binary tree")
    cat = enumerate_maximal_antichains(depth)
    for entry in cat:
        stats["sets"] = stats.get("sets", 0) + 1
        if not o.consistent(entry):
            return CheckReport.fail("maximal-antichain", list(entry), **stats)
    r = _pairs_inconsistent(o, depth, comparable, "comparable-pair", stats)
    return r if r is not None else CheckReport.ok(**stats)


def maximal_bad_pair_free_sets(depth: int) -> list[tuple[tuple, ...]]:
    """Maximal subsets of the binary tree of ``depth`` containing no bad pair."""
    ns = [tuple(x) for x in all_nodes(depth, 2)]
    g = nx.Graph()
    g.add_nodes_from(ns)
    g.add_edges_from((a, b) for a, b in itertools.combinations(ns, 2) if not is_bad_pair(a, b))
    return sorted(tuple(sorted(c)) for c in nx.find_cliques(g))


def _check_ssop1(o, depth, mode, stats) -> CheckReport:
    if o.branching != 2:
        raise InputError("ssop1 is defined on the binary tree")
    if mode is Mode.FULL:
        return _full_equivalence(o, depth, is_bad_pair, "bad-pair-equivalence", stats)
    r = _pairs_inconsistent(o, depth, is_bad_pair, "bad-pair", stats)
    if r is not None:
        return r
    for s in maximal_bad_pair_free_sets(depth):
        stats["sets"] = stats.get("sets", 0) + 1
        if not o.consistent(s):
            return CheckReport.fail("maximal-free-set", [Node(x) for x in s], **stats)
    return CheckReport.ok(**stats)


def _canonical(t: Sequence[Sequence[int]]) -> tuple[tuple, ...]:
    return tuple(sorted({tuple(x) for x in t}))


def _check_astr(o, depth, prop: Property, stats) -> CheckReport:
    groups: dict[int, set] = {}
    for t in prop.A:
        c = _canonical(t)
        if not c:
            raise InputError("empty tuple in A")
        if len(c) > ASTR_ARITY_CAP:
            raise ResourceError(f"tuple arity {len(c)} above cap {ASTR_ARITY_CAP}")
        for x in c:
            if any(not 0 <= s < o.branching for s in x):
                raise InputError(f"tuple node {Node(x)} outside branching {o.branching}")
        groups.setdefault(len(c), set()).add(type_profile([Node(x) for x in c]).signature())
    ns = _nodes(o, depth)
    for arity in sorted(groups):
        sigs = groups[arity]
        for combo in itertools.combinations(ns, arity):
            if type_profile([Node(x) for x in combo]).signature() in sigs:
                stats["sets"] = stats.get("sets", 0) + 1
                if o.consistent(combo):
                    return CheckReport.fail("similar-tuple", [Node(x) for x in combo], **stats)
    return CheckReport.ok(**stats)


def check_property(
    o: ConsistencyOracle, prop: Property | str, depth: int, mode: Mode | str = Mode.FULL
) -> CheckReport:
    if isinstance(prop, str):
        prop = parse_property(prop)
    if isinstance(mode, str):
        try:
            mode = Mode(mode.lower())
        except ValueError:
            raise InputError(f"unknown mode {mode!r}") from None
    if depth < 1:
        raise InputError("depth must be at least 1")
    if depth > o.depth:
        raise InputError(f"check depth {depth} exceeds oracle depth {o.depth}")
    if prop.kind == "tp2":
        raise InputError("tp2 is checked on grids; use check_tp2")
    stats: dict = {"property": prop.label(), "depth": depth, "mode": mode.value}
    if prop.kind == "atp":
        return _check_atp(o, depth, mode, stats)
    if prop.kind == "ssop1":
        return _check_ssop1(o, depth, mode, stats)
    r = _chains_ok(o, depth, stats)
    if r is not None:
        return r
    if prop.kind in ("sop2", "tp1"):
        r = _pairs_inconsistent(o, depth, lambda a, b: not comparable(a, b), "incomparable-pair", stats)
    elif prop.kind == "sop1":
        if o.branching != 2:
            raise InputError("sop1 is defined on the binary tree")
        r = _pairs_inconsistent(o, depth, is_bad_pair, "bad-pair", stats)
    elif prop.kind == "ktp1":
        r = _ksets_inconsistent(o, depth, prop.k, _pairwise_incomparable, "incomparable-k-set", stats)
    elif prop.kind == "weak_ktp1":
        r = _ksets_inconsistent(o, depth, prop.k, _common_fork, "fork-k-set", stats)
    elif prop.kind == "astr":
        r = _check_astr(o, depth, prop, stats)
    else:
        raise InputError(f"unknown property kind {prop.kind!r}")
    return r if r is not None else CheckReport.ok(**stats)


def check_tp2(grid: GridOracle, m: int | None = None) -> CheckReport:
    m = grid.m if m is None else m
    if m < 1:
        raise InputError("grid size must be positive")
    if m > TP2_BOUND:
        raise ResourceError(f"grid size {m} above bound {TP2_BOUND}")
    sets = 0
    for i in range(m):
        for j, j2 in itertools.combinations(range(m), 2):
            sets += 1
            if grid.consistent({(i, j), (i, j2)}):
                return CheckReport.fail("row", [(i, j), (i, j2)], sets=sets)
    for f in itertools.product(range(m), repeat=m):
        sets += 1
        cells = [(i, f[i]) for i in range(m)]
        if not grid.consistent(cells):
            return CheckReport.fail("transversal", cells, sets=sets)
    return CheckReport.ok(sets=sets)


class SubsetClass(enum.Enum):
    CHAIN = "chain"
    BAD_PAIR = "bad_pair"
    NEITHER = "neither"


def classify_subset(xs: Iterable[Sequence[int]]) -> SubsetClass:
    items = [tuple(x) for x in xs]
    for x in items:
        if any(s not in (0, 1) for s in x):
            raise InputError("classification is defined on binary nodes")
    if is_chain(items):
        return SubsetClass.CHAIN
    if contains_bad_pair(items):
        return SubsetClass.BAD_PAIR
    return SubsetClass.NEITHER


def find_bad_pair(xs: Iterable[Sequence[int]]) -> tuple[Node, Node, Node] | None:
    """``(xi, xi+1, tau)`` for the least bad pair inside ``xs``."""
    items = sorted({tuple(x) for x in xs})
    for a in items:
        if a and a[-1] == 1:
            s = a[:-1] + (0,)
            for b in items:
                if b[: len(s)] == s:
                    return Node(a[:-1]), Node(a), Node(b)
    return None


def verify_downward_closed(o: ConsistencyOracle, depth: int) -> CheckReport:
    ns = _nodes(o, depth)
    if (1 << len(ns)) > FULL_SUBSET_BOUND:
        raise ResourceError("downward-closure check limited to 2^15 subsets")
    cons = {}
    for k in range(len(ns) + 1):
        for combo in itertools.combinations(ns, k):
            c = o.consistent(combo)
            cons[combo] = c
            if c:
                for i in range(k):
                    sub = combo[:i] + combo[i + 1:]
                    if not cons[sub]:
                        return CheckReport.fail("downward", [Node(x) for x in combo])
    return CheckReport.ok(sets=len(cons))


class Shape(enum.Enum):
    SOP2 = "sop2"
    ANTICHAIN = "antichain"


POSITIONS: tuple[tuple[int, ...], ...] = ((), (0,), (0, 0), (0, 1), (1,), (1, 0), (1, 1))
PARENT = (-1, 0, 1, 1, 0, 4, 4)


@lru_cache(maxsize=None)
def _position_incomparable() -> tuple[tuple[bool, ...], ...]:
    return tuple(tuple(not comparable(p, q) for q in POSITIONS) for p in POSITIONS)


def find_pattern_depth2(
    o: ConsistencyOracle, target: Shape | str, depth: int | None = None
) -> dict[tuple, Node] | None:
    """Least assignment of the seven height-two positions realising ``target``.

    Assignments are compared as tuples of images in position order
    (root, 0, 00, 01, 1, 10, 11) with nodes in lexicographic order.
    """
    if isinstance(target, str):
        target = Shape(target.lower())
    d = o.depth if depth is None else depth
    if d < 2 or d > o.depth:
        raise InputError(f"search depth must be in [2, {o.depth}]")
    cands = _nodes(o, d)
    if len(cands) > PATTERN_NODE_BOUND:
        raise ResourceError(f"{len(cands)} candidate nodes above bound {PATTERN_NODE_BOUND}")
    inc = _position_incomparable()
    cache: dict[frozenset, bool] = {}

    def cons(xs) -> bool:
        key = frozenset(xs)
        v = cache.get(key)
        if v is None:
            v = cache[key] = o.consistent(key)
        return v

    chosen: list[tuple] = []
    ancestors = [[q for q in range(p + 1) if comparable(POSITIONS[q], POSITIONS[p]) and q <= p] for p in range(7)]

    def ok_sop2(p: int, x: tuple) -> bool:
        if not cons([chosen[q] for q in ancestors[p] if q < p] + [x]):
            return False
        return all(not cons((chosen[q], x)) for q in range(p) if inc[p][q])

    def ok_antichain(p: int, x: tuple) -> bool:
        imgs = chosen + [x]
        for r in range(p + 1):
            for sub in itertools.combinations(range(p), r):
                T = sub + (p,)
                want = all(inc[a][b] for a, b in itertools.combinations(T, 2))
                if cons([imgs[t] for t in T]) != want:
                    return False
        return True

    ok = ok_sop2 if target is Shape.SOP2 else ok_antichain

    def place(p: int) -> bool:
        if p == 7:
            return True
        for x in cands:
            if ok(p, x):
                chosen.append(x)
                if place(p + 1):
                    return True
                chosen.pop()
        return False

    if place(0):
        return {POSITIONS[p]: Node(chosen[p]) for p in range(7)}
    return None


def random_solution_oracle(
    rng: random.Random, depth: int, branching: int = 2, noise: float | None = None
) -> SolutionSetOracle:
    """One solver per branch, plus stray memberships with probability ``noise``.

    Without noise every branch is consistent and incomparable nodes never
    share a solver; noise breaks that at random, so verdicts vary.
    """
    if noise is None:
        noise = rng.choice((0.0, 0.02, 0.1, 0.3))
    ns = [tuple(x) for x in all_nodes(depth, branching)]
    sols: dict[tuple, set] = {x: set() for x in ns}
    for sid, leaf in enumerate(leaves(depth, branching)):
        for x in branch_chain(leaf):
            if rng.random() >= noise / 2:
                sols[tuple(x)].add(sid)
        for x in ns:
            if rng.random() < noise:
                sols[x].add(sid)
    return SolutionSetOracle(depth, branching, sols, frozenset(range(len(leaves(depth, branching)))))


def oracle_from_json(obj: dict) -> ConsistencyOracle:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("oracle JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "synthetic":
            return synthetic(obj["rule"], int(obj["depth"]), int(obj.get("branching", 2)))
        if kind == "solution_set":
            b = int(obj.get("branching", 2))
            sols = {tuple(Node.parse(k, b)): v for k, v in obj["solutions"].items()}
            return SolutionSetOracle(int(obj["depth"]), b, sols)
        if kind == "pullback":
            inner = oracle_from_json(obj["inner"])
            res = pull_back(inner, obj["map"], obj.get("depth"))
            if isinstance(res, GridOracle):
                raise InputError("grid pullbacks are not node oracles")
            return res
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed oracle JSON: {exc}") from None
    raise InputError(f"unknown oracle kind {kind!r}")
