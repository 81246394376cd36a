"""Finite searches for dense colors and monochromatic successor-respecting trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import InputError, ResourceError
from .treecore import Node, all_nodes

DEFAULT_BUDGET = 10**7


@dataclass
class Coloring:
    """Colors on the nodes of length below ``depth``; unlisted nodes get ``default``."""

    depth: int
    branching: int = 2
    colors: dict = field(default_factory=dict)
    default: int = 0

    def __post_init__(self):
        if self.depth < 1:
            raise InputError("coloring depth must be at least 1")
        if self.branching < 1:
            raise InputError("branching must be positive")
        clean = {}
        for k, v in self.colors.items():
            x = Node.parse(k, self.branching) if isinstance(k, str) else Node(k, self.branching)
            if len(x) >= self.depth:
                raise InputError(f"colored node {x} outside depth {self.depth}")
            clean[tuple(x)] = int(v)
        self.colors = clean

    def __call__(self, x) -> int:
        return self.colors.get(tuple(x), self.default)

    def nodes(self) -> tuple[Node, ...]:
        return all_nodes(self.depth, self.branching)

    @classmethod
    def from_function(cls, depth: int, branching: int, fn) -> "Coloring":
        return cls(depth, branching, {tuple(x): fn(tuple(x)) for x in all_nodes(depth, branching)})

    @classmethod
    def from_json(cls, obj: Mapping) -> "Coloring":
        try:
            b = int(obj.get("branching", 2))
            cols = {Node.parse(k, b): int(v) for k, v in obj.get("colors", {}).items()}
            return cls(int(obj["depth"]), b, cols, int(obj.get("default", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed coloring JSON: {exc}") from None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "depth": self.depth,
            "branching": self.branching,
            "default": self.default,
            "colors": {Node(k, self.branching).bits(): v for k, v in sorted(self.colors.items())},
        }


def _subtree_colors(c: Coloring) -> dict[tuple, int]:
    """Bitset of colors occurring at or below each node."""
    has: dict[tuple, int] = {}
    for x in sorted(c.nodes(), key=len, reverse=True):
        m = 1 << c(x)
        if len(x) + 1 < c.depth:
            for d in range(c.branching):
                m |= has[tuple(x) + (d,)]
        has[tuple(x)] = m
    return has


def find_dense_color(c: Coloring, margin: int = 0) -> tuple[Node, int] | None:
    """Least ``(node, color)`` such that the color stays reachable below every extension.

    Only extensions of length at most ``depth - 1 - margin`` are quantified,
    and the returned node itself lies in that range.
    """
    if margin < 0:
        raise InputError("margin must be nonnegative")
    top = c.depth - 1 - margin
    if top < 0:
        return None
    has = _subtree_colors(c)
    # colors reachable from every extension down to level ``top``
    common: dict[tuple, int] = {}
    for x in sorted((x for x in c.nodes() if len(x) <= top), key=len, reverse=True):
        x = tuple(x)
        if len(x) == top:
            common[x] = has[x]
        else:
            m = has[x]
            for d in range(c.branching):
                m &= common[x + (d,)]
            common[x] = m
    for x in c.nodes():
        if len(x) > top:
            continue
        m = common[tuple(x)]
        if m:
            return Node(x, c.branching), (m & -m).bit_length() - 1
    return None


def find_mono_embedding(
    c: Coloring, height: int, target_branching: int = 2, budget: int = DEFAULT_BUDGET
) -> dict[Node, Node] | None:
    """Depth-first search for a monochromatic map from ``height``-deep ``target_branching`` trees.

    The map must send ``x + (i,)`` to an extension of ``h(x) + (i,)``.
    Domain nodes are placed in lexicographic order and candidates are tried
    in lexicographic order, so the first map found is deterministic.
    """
    if height < 1:
        raise InputError("height must be at least 1")
    if not 1 <= target_branching <= c.branching:
        raise InputError("target branching must be between 1 and the coloring's branching")
    dom = [tuple(x) for x in all_nodes(height, target_branching)]
    pos = {x: i for i, x in enumerate(dom)}
    cod = [tuple(x) for x in c.nodes()]
    # index of the first node after the subtree of each node, in lex order
    subtree_end = {}
    stack: list[int] = []
    for i, x in enumerate(cod):
        while stack and cod[stack[-1]] != x[: len(cod[stack[-1]])]:
            subtree_end[cod[stack.pop()]] = i
        stack.append(i)
    for j in stack:
        subtree_end[cod[j]] = len(cod)
    cod_pos = {x: i for i, x in enumerate(cod)}
    h: list[tuple] = [()] * len(dom)
    steps = 0

    def room(i: int) -> int:
        # longest image allowed for dom[i] so its own subtree still fits
        return c.depth - 1 - (height - 1 - len(dom[i]))

    def place(i: int, color: int) -> bool:
        nonlocal steps
        if i == len(dom):
            return True
        x = dom[i]
        if x:
            start = h[pos[x[:-1]]] + (x[-1],)
            if start not in cod_pos:
                return False
            lo, hi = cod_pos[start], subtree_end[start]
        else:
            lo, hi = 0, len(cod)
        cap = room(i)
        for j in range(lo, hi):
            y = cod[j]
            steps += 1
            if steps > budget:
                raise ResourceError(f"embedding search exceeded budget {budget}")
            if len(y) > cap:
                continue
            if i and c(y) != color:
                continue
            h[i] = y
            if place(i + 1, c(y) if i == 0 else color):
                return True
        return False

    if not place(0, c.default):
        return None
    return {Node(x, target_branching): Node(y, c.branching) for x, y in zip(dom, h)}


def is_monochromatic(c: Coloring, table: Mapping) -> bool:
    return len({c(y) for y in table.values()}) <= 1
