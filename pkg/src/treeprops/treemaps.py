"""Recursive tree embeddings and the checks built on them."""
from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Sequence

from .errors import InputError
from .report import CheckReport
from .similarity import SimilarityLevel, graded_check
from .treecore import Node, all_nodes, is_antichain, is_prefix, meet, meet_closure_tuple


class MapName(enum.Enum):
    SOP1_FROM_AT = "sop1_from_at"
    TP2_FROM_AT = "tp2_from_at"
    BETA_FROM_GAMMA = "beta_from_gamma"
    AT_EMBED = "at_embed"
    SSOP1_FROM_AT = "ssop1_from_at"
    AT_FROM_SSOP1 = "at_from_ssop1"


NODE_MAPS = (
    MapName.SOP1_FROM_AT,
    MapName.BETA_FROM_GAMMA,
    MapName.AT_EMBED,
    MapName.SSOP1_FROM_AT,
    MapName.AT_FROM_SSOP1,
)


@lru_cache(maxsize=None)
def _sop1_from_at(x: tuple) -> tuple:
    if not x:
        return (1,)
    head = (0, 1, 1) if x[0] == 0 else (0,)
    return head + _sop1_from_at(x[1:])


@lru_cache(maxsize=None)
def _beta_from_gamma(x: tuple) -> tuple:
    if not x:
        return ()
    return _beta_from_gamma(x[:-1]) + ((0, 1) if x[-1] == 0 else (1,))


@lru_cache(maxsize=None)
def _at_embed(x: tuple) -> tuple:
    if not x:
        return (1,)
    return _at_embed(x[:-1]) + ((0, 0, 1) if x[-1] == 0 else (0, 1, 1))


@lru_cache(maxsize=None)
def _ssop1_from_at(x: tuple) -> tuple:
    if not x:
        return (0,)
    return _ssop1_from_at(x[:-1])[:-1] + ((1, 0, 0, 0) if x[-1] == 0 else (1, 0))


@lru_cache(maxsize=None)
def _at_from_ssop1(x: tuple) -> tuple:
    if not x:
        return (1,)
    return _at_from_ssop1(x[:-1])[:-1] + ((0, 0, 1) if x[-1] == 0 else (0, 1, 1))


_RAW = {
    MapName.SOP1_FROM_AT: _sop1_from_at,
    MapName.BETA_FROM_GAMMA: _beta_from_gamma,
    MapName.AT_EMBED: _at_embed,
    MapName.SSOP1_FROM_AT: _ssop1_from_at,
    MapName.AT_FROM_SSOP1: _at_from_ssop1,
}


@dataclass(frozen=True)
class NamedTreeMap:
    name: MapName
    antichain: tuple[Node, ...] = ()

    @classmethod
    def of(cls, name: str | MapName, antichain: Sequence[Node] = ()) -> "NamedTreeMap":
        if isinstance(name, str):
            try:
                name = MapName(name.lower())
            except ValueError:
                raise InputError(f"unknown map {name!r}") from None
        if name is MapName.TP2_FROM_AT:
            if not antichain or not is_antichain(antichain):
                raise InputError("tp2_from_at needs a nonempty antichain parameter")
        return cls(name, tuple(Node(x, 2) for x in antichain))

    @property
    def on_nodes(self) -> bool:
        return self.name is not MapName.TP2_FROM_AT

    def __call__(self, arg):
        return apply_map(self, arg)

    def image_length(self, depth: int) -> int:
        """Longest image length over the domain ``all_nodes(depth)``."""
        if self.name is MapName.TP2_FROM_AT:
            m = len(self.antichain)
            return max(len(x) for x in self.antichain) + m - 1
        return max(len(apply_map(self, x)) for x in all_nodes(depth, 2))


def _binary(x: Sequence[int]) -> tuple:
    t = tuple(x)
    if any(s not in (0, 1) for s in t):
        raise InputError(f"map input must be a binary node, got {list(t)}")
    return t


def apply_map(m: NamedTreeMap | MapName | str, arg) -> Node:
    if not isinstance(m, NamedTreeMap):
        m = NamedTreeMap.of(m)
    if m.name is MapName.TP2_FROM_AT:
        try:
            i, j = arg
            i, j = int(i), int(j)
        except (TypeError, ValueError):
            raise InputError("tp2_from_at takes a grid coordinate (i, j)") from None
        n = len(m.antichain)
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"grid coordinate ({i}, {j}) out of range for size {n}")
        return m.antichain[i].concat((0,) * j)
    return Node(_RAW[m.name](_binary(arg)), 2)


def stagewise_sop1_tables(n_max: int) -> list[dict]:
    """The inductive family ``h_0, h_1, ...`` for SOP1_FROM_AT, built stage by stage."""
    tables = [{(): (1,)}]
    for n in range(n_max):
        prev = tables[-1]
        cur = {(): (1,)}
        for nu, img in prev.items():
            cur[(0,) + nu] = (0, 1, 1) + img
            cur[(1,) + nu] = (0,) + img
        tables.append(cur)
    return tables


def map_table(m: NamedTreeMap, depth: int) -> dict[Node, Node]:
    """The map on all nodes of length < ``depth``."""
    return {x: apply_map(m, x) for x in all_nodes(depth, 2)}


def validate_successor_preserving(
    table: Mapping[Sequence[int], Sequence[int]], depth: int | None = None, branching: int = 2
) -> CheckReport:
    """Check the successor premise and, if it holds, its two consequences.

    ``table`` must be total on all nodes of length < ``depth``; depth is
    inferred from the longest key when omitted.
    """
    t = {tuple(k): tuple(v) for k, v in table.items()}
    if not t:
        raise InputError("empty table")
    if depth is None:
        depth = 1 + max(len(k) for k in t)
    dom = [tuple(x) for x in all_nodes(depth, branching)]
    missing = [x for x in dom if x not in t]
    if missing:
        raise InputError(f"table is partial: missing {Node(missing[0])}")
    checked = 0
    for x in dom:
        if len(x) + 1 >= depth:
            continue
        for d in range(branching):
            checked += 1
            if not is_prefix(t[x] + (d,), t[x + (d,)]):
                return CheckReport.fail(
                    "premise", {"node": Node(x), "symbol": d, "image": Node(t[x]), "child_image": Node(t[x + (d,)])},
                    checked=checked,
                )
    for x in dom:
        for y in dom:
            checked += 1
            if is_prefix(t[x], t[y]) != is_prefix(x, y):
                return CheckReport.fail("conclusion-prefix", (Node(x), Node(y)), checked=checked)
            if tuple(meet(Node(t[x]), Node(t[y]))) != t[tuple(meet(Node(x), Node(y)))]:
                return CheckReport.fail("conclusion-meet", (Node(x), Node(y)), checked=checked)
    return CheckReport.ok(checked=checked)


def remark47_hypothesis(
    sigma: Sequence[Sequence[int]], top: Sequence[int], eta: Sequence[int], nu: Sequence[int]
) -> tuple[str | None, int | None]:
    """Return ``(failed_clause, None)`` or ``(None, l)`` for the witnessing ``l``."""
    top, eta, nu = tuple(top), tuple(eta), tuple(nu)
    if top + (1,) in (eta, nu):
        return "iii", None
    for l in (0, 1):
        s = top + (l,)
        if is_prefix(s, eta) and is_prefix(s, nu):
            if any(is_prefix(s, tuple(x)) for x in sigma):
                return "ii", None
            return None, l
    return "i", None


def check_remark47(
    sigma: Sequence[Sequence[int]],
    top: Sequence[int],
    eta: Sequence[int],
    nu: Sequence[int],
    thetas: Sequence[Sequence[int]],
) -> CheckReport:
    for x in itertools.chain(sigma, (top, eta, nu), thetas):
        _binary(x)
    if not thetas:
        raise InputError("theta tuple must be nonempty")
    clause, l = remark47_hypothesis(sigma, top, eta, nu)
    if clause is not None:
        return CheckReport.fail("hypothesis-" + clause, None, hypothesis=False)
    head = [Node(x, 2) for x in sigma] + [Node(top, 2)]
    left = head + [Node(tuple(eta) + tuple(th), 2) for th in thetas]
    right = head + [Node(tuple(nu) + tuple(th), 2) for th in thetas]
    v = graded_check(SimilarityLevel.BETA, meet_closure_tuple(left), meet_closure_tuple(right))
    if not v.equivalent:
        return CheckReport.fail("conclusion-" + str(v.clause), {"indices": v.indices}, hypothesis=True, l=l)
    return CheckReport.ok(hypothesis=True, l=l)


def random_remark47_instance(rng: random.Random, max_len: int = 6, tries: int = 10000):
    """Seeded rejection sampler for hypothesis-satisfying instances."""

    def word(lo: int, hi: int) -> tuple:
        return tuple(rng.randrange(2) for _ in range(rng.randint(lo, hi)))

    for _ in range(tries):
        top = word(0, max_len - 2)
        l = rng.randrange(2)
        room = max_len - len(top) - 1
        eta = top + (l,) + word(0, room)
        nu = top + (l,) + word(0, room)
        sigma = [word(0, max_len) for _ in range(rng.randint(0, 3))]
        thetas = [word(0, max(0, max_len - max(len(eta), len(nu)))) for _ in range(rng.randint(1, 3))]
        if remark47_hypothesis(sigma, top, eta, nu)[0] is None:
            return sigma, top, eta, nu, thetas
    raise InputError("no hypothesis-satisfying instance found")


@dataclass(frozen=True)
class LevelSets:
    i: int
    k: int
    L: tuple[Node, ...]
    one_xi: tuple[Node, ...]
    M: tuple[Node, ...]
    m: Node
    prefix: Node
    xi: Node

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "k": self.k,
            "prefix": list(self.prefix),
            "L": [list(x) for x in self.L],
            "one_xi_k": [list(x) for x in self.one_xi],
            "M": [list(x) for x in self.M],
            "m": list(self.m),
        }


def gen_level_sets(
    i: int, k: int, prefix: Sequence[int] | None = None, embed: Callable[[tuple], tuple] = _at_embed
) -> LevelSets:
    """The level sets for level ``i`` and height ``k``.

    ``embed`` is the generating map; the default is AT_EMBED.  Passing
    ``_at_from_ssop1`` yields the variant drawn in the tree figure.
    """
    if i < 0 or k < 0:
        raise InputError("level and height must be nonnegative")
    pre = tuple(prefix) if prefix is not None else ()
    L = {embed(nu) for nu in itertools.product((0, 1), repeat=i)}
    xi = embed((0,) * i)
    ones = {xi + (1,) * d for d in range(k + 1)}
    M = L | ones
    rel = lambda s: tuple(sorted(Node(pre + x, 2) for x in s))  # noqa: E731
    return LevelSets(
        i, k, rel(L), rel(ones), rel(M), Node(pre + xi + (1,) * k, 2), Node(pre, 2), Node(xi, 2)
    )


def _meet_all(xs: Sequence[Sequence[int]]) -> tuple:
    out = tuple(xs[0])
    for x in xs[1:]:
        n = 0
        while n < len(out) and n < len(x) and out[n] == x[n]:
            n += 1
        out = out[:n]
    return out


def verify_levelset_facts(
    i_max: int,
    k_max: int,
    embed: Callable[[tuple], tuple] = _at_embed,
    sets: Callable[..., LevelSets] | None = None,
) -> CheckReport:
    """Check the bullet facts about the level sets for all ``i <= i_max, k <= k_max``.

    ``sets(i, k, prefix)`` replaces the generator; tests use it to inject a
    corrupted family.
    """
    if i_max < 0 or k_max < 0:
        raise InputError("bounds must be nonnegative")
    gen = sets or (lambda i, k, prefix=None: gen_level_sets(i, k, prefix, embed=embed))
    checked = 0
    L0 = gen(0, 0).L
    if [tuple(x) for x in L0] != [(1,)]:
        return CheckReport.fail("L0", L0)
    for k in range(k_max + 1):
        for pre in ((), (0,), (1, 0), (0, 1, 1)):
            checked += 1
            if not all(is_prefix(pre, x) and all(c == 1 for c in tuple(x)[len(pre):]) for x in gen(0, k, pre).M):
                return CheckReport.fail("M0-in-ones", {"k": k, "prefix": Node(pre)})
    for i in range(i_max + 1):
        for k in range(k_max + 1):
            s = gen(i, k)
            M = [tuple(x) for x in s.M]
            m = tuple(s.m)
            checked += 1
            if m not in M:
                return CheckReport.fail("m-in-M", {"i": i, "k": k})
            longest = max(len(x) for x in M)
            if len(m) != longest:
                return CheckReport.fail("m-longest", {"i": i, "k": k, "m": Node(m)})
            # at k = 0 the stem ties with the rest of its level
            if k >= 1 and sum(1 for x in M if len(x) == longest) != 1:
                return CheckReport.fail("m-longest-unique", {"i": i, "k": k})
            bad = [x for x in M if not x or x[-1] != 1]
            if bad:
                return CheckReport.fail("ends-in-1", {"i": i, "k": k, "node": Node(bad[0])})
            want = (0,) if i > 0 else (1,)
            got = _meet_all(M)
            if got != want:
                return CheckReport.fail("meet", {"i": i, "k": k, "meet": Node(got), "expected": Node(want)})
    for i in range(i_max):
        for k in range(k_max + 1):
            checked += 1
            nxt = {tuple(x) for x in gen(i + 1, k).M}
            cover = {tuple(x) for p in ((0, 0), (0, 1)) for x in gen(i, k, p).M}
            missing = sorted(nxt - cover)
            if missing:
                return CheckReport.fail("inclusion", {"i": i, "k": k, "node": Node(missing[0])})
    return CheckReport.ok(checked=checked)


def closing_argument_holds(depth: int, embed: Callable[[tuple], tuple] = _at_embed) -> CheckReport:
    """For proper prefixes x of y: ``h(x) = h(x)^- + 1`` and ``h(x)^- + 0`` is a prefix of ``h(y)``."""
    dom = [tuple(x) for x in all_nodes(depth, 2)]
    for x in dom:
        hx = embed(x)
        if hx[-1] != 1:
            return CheckReport.fail("ends-in-1", Node(x))
        for y in dom:
            if len(x) < len(y) and y[: len(x)] == x:
                if not is_prefix(hx[:-1] + (0,), embed(y)):
                    return CheckReport.fail("stem-0", (Node(x), Node(y)))
    return CheckReport.ok()


def is_bad_pair(x: Sequence[int], y: Sequence[int]) -> bool:
    """``{x, y}`` has the shape ``{xi+1, tau}`` with ``tau`` extending ``xi+0``."""
    x, y = tuple(x), tuple(y)
    for a, b in ((x, y), (y, x)):
        if a and a[-1] == 1:
            s = a[:-1] + (0,)
            if is_prefix(s, b):
                return True
    return False
