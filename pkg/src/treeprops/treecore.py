"""Finite tree nodes as strings over a branching alphabet.

A node is a tuple of nonnegative ints; the empty tuple is the root.  Python's
built-in tuple ordering coincides with the lexicographic tree order used
throughout the package (a proper prefix sorts first, otherwise the first
differing symbol decides), so ``sorted`` gives canonical order for free.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import InputError, ResourceError

DEFAULT_ENUM_BOUND = 6


class Node(tuple):
    """A tree node.  Equality and hashing are plain tuple semantics.

    ``branching`` is optional metadata used only for validation; two nodes
    with the same symbols are equal whatever their bound.
    """

    def __new__(cls, symbols: Iterable[int] = (), branching: int | None = None):
        self = super().__new__(cls, symbols)
        if branching is not None:
            if branching < 1:
                raise InputError(f"branching bound must be positive, got {branching}")
            for s in self:
                if not 0 <= s < branching:
                    raise InputError(f"symbol {s} out of range for branching {branching}")
        else:
            for s in self:
                if s < 0:
                    raise InputError(f"negative symbol {s}")
        self.branching = branching
        return self

    def __getnewargs__(self):
        return (tuple(self), self.branching)

    @classmethod
    def parse(cls, text: str, branching: int | None = None) -> "Node":
        """Parse the CLI syntax: a bitstring, ``e`` for the root, or ``[0,2,1]``."""
        text = text.strip()
        if text in ("e", "", "[]"):
            return cls((), branching)
        if text.startswith("["):
            if not text.endswith("]"):
                raise InputError(f"malformed node {text!r}")
            try:
                syms = [int(p) for p in text[1:-1].split(",") if p.strip()]
            except ValueError:
                raise InputError(f"malformed node {text!r}") from None
            return cls(syms, branching)
        if not text.isdigit():
            raise InputError(f"malformed node {text!r}")
        return cls((int(c) for c in text), branching if branching is not None else 2)

    @property
    def parent(self) -> "Node":
        """The node with its last symbol dropped."""
        if not self:
            raise InputError("the root has no parent")
        return Node(self[:-1], self.branching)

    @property
    def last(self) -> int:
        if not self:
            raise InputError("the root has no last symbol")
        return self[-1]

    def child(self, *symbols: int) -> "Node":
        return Node(tuple(self) + symbols, self.branching)

    def concat(self, other: Sequence[int]) -> "Node":
        return Node(tuple(self) + tuple(other), self.branching)

    def bits(self) -> str:
        if not self:
            return "e"
        if all(s < 10 for s in self) and (self.branching or 2) <= 10:
            return "".join(map(str, self))
        return "[" + ",".join(map(str, self)) + "]"

    def __str__(self):
        return self.bits()

    def __repr__(self):
        return f"Node({self.bits()!r})"


def node(text_or_syms, branching: int | None = None) -> Node:
    """Convenience constructor accepting ``"011"``, ``"e"`` or a sequence."""
    if isinstance(text_or_syms, str):
        return Node.parse(text_or_syms, branching)
    return Node(text_or_syms, branching)


def _check_pair(a: Node, b: Node) -> None:
    ba = getattr(a, "branching", None)
    bb = getattr(b, "branching", None)
    if ba is not None and bb is not None and ba != bb:
        raise InputError(f"branching mismatch: {ba} vs {bb}")


class Relation(enum.Enum):
    EQ = "eq"
    PREFIX = "prefix"          # first is a proper initial segment of second
    EXTENSION = "extension"    # second is a proper initial segment of first
    INCOMPARABLE = "incomparable"


def is_prefix(a: Sequence[int], b: Sequence[int]) -> bool:
    """``a`` is an initial segment of ``b`` (non-strict)."""
    return len(a) <= len(b) and tuple(b[: len(a)]) == tuple(a)


def is_proper_prefix(a: Sequence[int], b: Sequence[int]) -> bool:
    return len(a) < len(b) and tuple(b[: len(a)]) == tuple(a)


def comparable(a: Sequence[int], b: Sequence[int]) -> bool:
    n = min(len(a), len(b))
    return tuple(a[:n]) == tuple(b[:n])


def relate(a: Node, b: Node) -> Relation:
    _check_pair(a, b)
    if len(a) <= len(b):
        if tuple(b[: len(a)]) == tuple(a):
            return Relation.EQ if len(a) == len(b) else Relation.PREFIX
        return Relation.INCOMPARABLE
    if tuple(a[: len(b)]) == tuple(b):
        return Relation.EXTENSION
    return Relation.INCOMPARABLE


def _common_len(a: Sequence[int], b: Sequence[int]) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def meet(a: Node, b: Node) -> Node:
    """Longest common initial segment."""
    _check_pair(a, b)
    br = getattr(a, "branching", None) or getattr(b, "branching", None)
    return Node(a[: _common_len(a, b)], br)


def lex_less(a: Node, b: Node) -> bool:
    _check_pair(a, b)
    return tuple(a) < tuple(b)


def meet_closure(nodes: Sequence[Node]) -> tuple[Node, ...]:
    """Deduplicated pairwise meets of ``nodes`` in canonical order."""
    if not nodes:
        raise InputError("meet closure of an empty tuple")
    out = {meet(x, y) for x in nodes for y in nodes}
    return tuple(sorted(out))


def meet_closure_tuple(nodes: Sequence[Node]) -> tuple[Node, ...]:
    """Positional closure ``<n0^n0, n0^n1, ..., nk^nk>`` (keeps duplicates).

    Positions line up across tuples of equal arity, which the graded
    equivalences need.
    """
    if not nodes:
        raise InputError("meet closure of an empty tuple")
    return tuple(meet(x, y) for x in nodes for y in nodes)


def is_meet_closed(nodes: Iterable[Sequence[int]]) -> bool:
    s = {tuple(x) for x in nodes}
    for x in s:
        for y in s:
            if tuple(x[: _common_len(x, y)]) not in s:
                return False
    return True


def is_antichain(nodes: Iterable[Sequence[int]]) -> bool:
    xs = list({tuple(x) for x in nodes})
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            if comparable(xs[i], xs[j]):
                return False
    return True


def is_chain(nodes: Iterable[Sequence[int]]) -> bool:
    xs = sorted({tuple(x) for x in nodes}, key=len)
    return all(is_prefix(xs[i], xs[i + 1]) for i in range(len(xs) - 1))


@lru_cache(maxsize=64)
def _all_nodes(depth: int, branching: int) -> tuple[Node, ...]:
    out = [Node((), branching)]
    frontier = [()]
    for _ in range(depth - 1):
        frontier = [p + (s,) for p in frontier for s in range(branching)]
        out.extend(Node(p, branching) for p in frontier)
    return tuple(sorted(out))


def all_nodes(depth: int, branching: int = 2) -> tuple[Node, ...]:
    """All nodes of length < ``depth`` in canonical order."""
    if depth < 0:
        raise InputError("negative depth")
    if depth == 0:
        return ()
    return _all_nodes(depth, branching)


def nodes_upto(length: int, branching: int = 2) -> tuple[Node, ...]:
    """All nodes of length <= ``length``."""
    return all_nodes(length + 1, branching)


def leaves(depth: int, branching: int = 2) -> list[Node]:
    return [x for x in all_nodes(depth, branching) if len(x) == depth - 1]


def branch_chain(leaf: Node) -> list[Node]:
    """``{leaf | a : a <= len(leaf)}``."""
    return [Node(leaf[:a], leaf.branching) for a in range(len(leaf) + 1)]


def is_maximal_antichain(nodes: Iterable[Sequence[int]], depth: int) -> bool:
    xs = [tuple(x) for x in nodes]
    for x in xs:
        if len(x) >= depth:
            raise InputError(f"node {Node(x)} outside depth {depth}")
    if not is_antichain(xs):
        return False
    for y in all_nodes(depth, 2):
        if not any(comparable(x, y) for x in xs):
            return False
    return True


def birthday(antichain: Sequence[Sequence[int]]) -> int:
    return 1 + max(len(x) for x in antichain)


@dataclass(frozen=True)
class AntichainCatalog:
    """All maximal antichains of the binary tree of a given depth.

    Entries are tuples of nodes in canonical order, sorted by
    ``(birthday, node list)`` so that the catalog for a smaller depth is a
    prefix of the catalog for a larger one.
    """

    depth: int
    entries: tuple[tuple[Node, ...], ...]

    @property
    def count(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def index(self, antichain: Iterable[Sequence[int]]) -> int:
        key = tuple(sorted(tuple(x) for x in antichain))
        return self._lookup()[key]

    def _lookup(self) -> dict:
        lk = self.__dict__.get("_lk")
        if lk is None:
            lk = {tuple(tuple(x) for x in e): i for i, e in enumerate(self.entries)}
            object.__setattr__(self, "_lk", lk)
        return lk


def _raw_maximal_antichains(depth: int) -> list[tuple[tuple[int, ...], ...]]:
    # {root} alone, or one maximal antichain in each child subtree.
    if depth == 1:
        return [((),)]
    sub = _raw_maximal_antichains(depth - 1)
    left = [tuple((0,) + x for x in a) for a in sub]
    right = [tuple((1,) + x for x in a) for a in sub]
    out = [((),)]
    out.extend(a + b for a in left for b in right)
    return out


@lru_cache(maxsize=8)
def _catalog(depth: int) -> AntichainCatalog:
    raw = _raw_maximal_antichains(depth)
    raw.sort(key=lambda a: (1 + max(map(len, a)), a))
    intern = {tuple(x): x for x in all_nodes(depth, 2)}
    entries = tuple(tuple(intern[x] for x in a) for a in raw)
    return AntichainCatalog(depth, entries)


def enumerate_maximal_antichains(depth: int, bound: int = DEFAULT_ENUM_BOUND) -> AntichainCatalog:
    if depth < 1:
        raise InputError("depth must be at least 1")
    if depth > bound:
        raise ResourceError(f"depth {depth} exceeds enumeration bound {bound}")
    return _catalog(depth)


def maximal_antichain_count(depth: int) -> int:
    """Closed recursion ``c(1) = 1, c(n+1) = c(n)^2 + 1``."""
    c = 1
    for _ in range(depth - 1):
        c = c * c + 1
    return c


def gen_O(eta: Node, count: int) -> tuple[Node, ...]:
    return tuple(sorted(eta.concat((0,) * b) for b in range(count)))


def gen_K(eta: Node, branching: int, width: int, count: int) -> tuple[Node, ...]:
    """``{eta + nu + 0^b : nu of length width over branching, b < count}``."""
    if branching < 1 or width < 0 or count < 0:
        raise InputError("gen_K needs branching >= 1, width >= 0, count >= 0")
    bound = None if eta.branching is None else max(eta.branching, branching)
    out = set()
    for nu in itertools.product(range(branching), repeat=width):
        for b in range(count):
            out.add(Node(tuple(eta) + nu + (0,) * b, bound))
    return tuple(sorted(out))


def iter_subsets(items: Sequence, max_size: int | None = None) -> Iterator[tuple]:
    """Subsets by increasing size, each size in lexicographic order."""
    top = len(items) if max_size is None else min(max_size, len(items))
    for k in range(top + 1):
        yield from itertools.combinations(items, k)
