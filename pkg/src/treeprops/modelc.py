"""The incidence structure whose solvers are the maximal antichains.

Elements are solvers ``a:<l>`` (one per catalog entry) and parameters
``b:<bits>`` (one per node).  ``R(a, b)`` holds when the node lies in the
antichain.  Everything here is exhaustive at small depth.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import InputError, ResourceError
from .fol import FiniteStructure, predecessor_formula
from .report import CheckReport
from .treecore import (
    Node,
    all_nodes,
    branch_chain,
    comparable,
    enumerate_maximal_antichains,
    is_antichain,
    is_proper_prefix,
    leaves,
)
from .witness import Mode, SolutionSetOracle, check_property

STRUCTURE_BOUND = 5
PHI_VARIANTS = ("literal", "strict")
DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class ElementRef:
    kind: str  # "a" or "b"
    index: int | None = None
    node: tuple | None = None

    @classmethod
    def solver(cls, l: int) -> "ElementRef":
        return cls("a", index=int(l))

    @classmethod
    def param(cls, x: Sequence[int]) -> "ElementRef":
        return cls("b", node=tuple(x))

    @classmethod
    def parse(cls, text: str) -> "ElementRef":
        kind, _, rest = text.partition(":")
        if kind == "a":
            try:
                return cls.solver(int(rest))
            except ValueError:
                raise InputError(f"bad solver reference {text!r}") from None
        if kind == "b":
            return cls.param(Node.parse(rest))
        raise InputError(f"element reference must start with a: or b:, got {text!r}")

    def __str__(self):
        return f"a:{self.index}" if self.kind == "a" else f"b:{Node(self.node).bits()}"


@dataclass
class IncidenceStructure:
    """Solvers given as node sets over the binary tree of ``depth``."""

    depth: int
    solvers: tuple[tuple[Node, ...], ...]
    nodes: tuple[Node, ...] = field(default=())

    def __post_init__(self):
        if not self.nodes:
            self.nodes = all_nodes(self.depth, 2)
        self._pos = {tuple(x): i for i, x in enumerate(self.nodes)}
        for s in self.solvers:
            for x in s:
                if tuple(x) not in self._pos:
                    raise InputError(f"solver node {Node(x)} outside depth {self.depth}")

    @property
    def n_solvers(self) -> int:
        return len(self.solvers)

    @property
    def n_params(self) -> int:
        return len(self.nodes)

    @property
    def size(self) -> int:
        return self.n_solvers + self.n_params

    def adjacent(self, l: int, x: Sequence[int]) -> bool:
        return tuple(x) in self._solver_sets[l]

    @cached_property
    def _solver_sets(self) -> list[frozenset]:
        return [frozenset(tuple(x) for x in s) for s in self.solvers]

    @cached_property
    def node_masks(self) -> list[int]:
        """Bitset of solvers adjacent to each node, in ``self.nodes`` order."""
        masks = [0] * len(self.nodes)
        for l, s in enumerate(self.solvers):
            for x in s:
                masks[self._pos[tuple(x)]] |= 1 << l
        return masks

    def mask(self, x: Sequence[int]) -> int:
        return self.node_masks[self._pos[tuple(x)]]

    def consistent(self, xs: Sequence[Sequence[int]]) -> bool:
        acc = (1 << self.n_solvers) - 1
        for x in xs:
            acc &= self.mask(x)
        return acc != 0

    def element_index(self, e: ElementRef) -> int:
        if e.kind == "a":
            if not 0 <= e.index < self.n_solvers:
                raise InputError(f"solver index {e.index} out of range")
            return e.index
        if e.node not in self._pos:
            raise InputError(f"parameter {Node(e.node)} outside depth {self.depth}")
        return self.n_solvers + self._pos[e.node]

    def element(self, i: int) -> ElementRef:
        if i < self.n_solvers:
            return ElementRef.solver(i)
        return ElementRef.param(self.nodes[i - self.n_solvers])

    @cached_property
    def relation(self) -> np.ndarray:
        """``R`` as a square boolean matrix over the whole universe."""
        n = self.size
        r = np.zeros((n, n), dtype=bool)
        for l, s in enumerate(self.solvers):
            for x in s:
                r[l, self.n_solvers + self._pos[tuple(x)]] = True
        return r

    @cached_property
    def _phi_cache(self) -> dict:
        return {}

    def phi_table(self, variant: str = "literal") -> np.ndarray:
        """``T[x, y]`` for the predecessor formula over the whole universe."""
        if variant not in PHI_VARIANTS:
            raise InputError(f"unknown formula variant {variant!r}")
        if variant not in self._phi_cache:
            fs = FiniteStructure(self.size, {"R": self.relation})
            t = fs.evaluate(predecessor_formula("x", "y", exclude_self=variant == "strict"))
            assert t.vars == ("x", "y")
            self._phi_cache[variant] = t.data
        return self._phi_cache[variant]

    def to_json(self) -> dict:
        return {
            "format": 1,
            "depth": self.depth,
            "antichains": [[list(x) for x in s] for s in self.solvers],
        }


def build_structure(n: int, bound: int = STRUCTURE_BOUND) -> IncidenceStructure:
    if n < 1:
        raise InputError("depth must be at least 1")
    if n > bound:
        raise ResourceError(f"depth {n} exceeds structure bound {bound}")
    cat = enumerate_maximal_antichains(n)
    return IncidenceStructure(n, cat.entries)


def structure_from_json(obj: dict) -> IncidenceStructure:
    try:
        depth = int(obj["depth"])
        sols = tuple(tuple(Node(x, 2) for x in s) for s in obj["antichains"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed structure JSON: {exc}") from None
    if depth < 1:
        raise InputError("depth must be at least 1")
    return IncidenceStructure(depth, sols)


def chain_structure(n: int) -> IncidenceStructure:
    """Test double: one solver per branch, so consistency means lying on a branch."""
    return IncidenceStructure(n, tuple(tuple(branch_chain(leaf)) for leaf in leaves(n, 2)))


def verify_embedding_chain(
    n_max: int, builder: Callable[[int], IncidenceStructure] = build_structure
) -> CheckReport:
    """Identity on indices and nodes embeds each smaller structure in each larger one."""
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    structs = {n: builder(n) for n in range(1, n_max + 1)}
    checked = 0
    for n in range(1, n_max + 1):
        for m in range(1, n):
            small, big = structs[m], structs[n]
            if small.n_solvers > big.n_solvers:
                return CheckReport.fail("solver-count", {"m": m, "n": n})
            for l in range(small.n_solvers):
                for x in small.nodes:
                    checked += 1
                    if small.adjacent(l, x) != big.adjacent(l, x):
                        return CheckReport.fail(
                            "edge", {"m": m, "n": n, "solver": l, "node": Node(x)}, checked=checked
                        )
    return CheckReport.ok(checked=checked)


def solution_oracle(s: IncidenceStructure) -> SolutionSetOracle:
    sols: dict[tuple, set] = {tuple(x): set() for x in s.nodes}
    for l, sol in enumerate(s.solvers):
        for x in sol:
            sols[tuple(x)].add(l)
    return SolutionSetOracle(s.depth, 2, sols, universe=frozenset(range(s.n_solvers)))


def verify_prop62(s: IncidenceStructure, mode: Mode | str = Mode.FULL) -> CheckReport:
    if isinstance(mode, str):
        mode = Mode(mode.lower())
    if mode is Mode.FULL and s.depth > 4:
        raise ResourceError("full mode is limited to depth 4")
    return check_property(solution_oracle(s), "atp", s.depth, mode)


def pair_table(s: IncidenceStructure) -> np.ndarray:
    """``P[i, j]``: nodes i and j have a common solver."""
    m = np.array([[(a & b) != 0 for b in s.node_masks] for a in s.node_masks], dtype=bool)
    return m


def verify_remark63(s: IncidenceStructure) -> CheckReport:
    """No 4-tuple of parameters with two consistent pairs fully cross-inconsistent.

    Solvers have no solver partner, so they cannot enter the consistent
    pairs and the scan runs over parameters only.
    """
    if s.depth > 4:
        raise ResourceError("four-pattern scan is limited to depth 4")
    P = pair_table(s)
    n = len(s.nodes)
    D = P & ~np.eye(n, dtype=bool)  # consistent and distinct
    I = ~P
    # hit[c0, c1, c2, c3]
    hit = (
        D[:, :, None, None]
        & D[None, None, :, :]
        & I[:, None, :, None]
        & I[:, None, None, :]
        & I[None, :, :, None]
        & I[None, :, None, :]
    )
    if hit.any():
        c = tuple(int(v) for v in np.argwhere(hit)[0])
        return CheckReport.fail("pattern", [s.nodes[i] for i in c], tuples=n**4)
    return CheckReport.ok(tuples=n**4)


def verify_remark64(s: IncidenceStructure, max_size: int, budget: int = 10**7) -> CheckReport:
    """Every pairwise-consistent parameter set of size ``<= max_size`` is consistent."""
    if max_size < 0:
        raise InputError("max_size must be nonnegative")
    n = len(s.nodes)
    total = sum(_binom(n, k) for k in range(min(max_size, n) + 1))
    if total > budget:
        raise ResourceError(f"{total} subsets exceed budget {budget}")
    P = pair_table(s)
    forbid = [sum(1 << j for j in range(n) if not P[i, j]) for i in range(n)]
    full = (1 << s.n_solvers) - 1
    bad, visited = kernels.independent_sets_scan(s.node_masks, forbid, max_size, full)
    stats = {"visited": visited, "subsets_bound": total, "backend": kernels.BACKEND}
    if bad is None:
        return CheckReport.ok(**stats)
    # least counterexample by size then lex
    for k in range(1, max_size + 1):
        for combo in itertools.combinations(range(n), k):
            if all(P[i, j] for i, j in itertools.combinations(combo, 2)) and not s.consistent(
                [s.nodes[i] for i in combo]
            ):
                return CheckReport.fail("pairwise-not-joint", [s.nodes[i] for i in combo], **stats)
    raise AssertionError("kernel reported a failure the rescan cannot find")


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def eval_phi_pred(s: IncidenceStructure, x: ElementRef, y: ElementRef, variant: str = "literal") -> bool:
    return bool(s.phi_table(variant)[s.element_index(x), s.element_index(y)])


def verify_phi_semantics(s: IncidenceStructure, variant: str = "literal") -> CheckReport:
    """On parameters the formula is the strict prefix order; with a solver argument it is false."""
    T = s.phi_table(variant)
    k = s.n_solvers
    checked = 0
    for i, nu in enumerate(s.nodes):
        for j, eta in enumerate(s.nodes):
            checked += 1
            if bool(T[k + i, k + j]) != is_proper_prefix(eta, nu):
                return CheckReport.fail(
                    "predecessor",
                    {"x": str(ElementRef.param(nu)), "y": str(ElementRef.param(eta)), "value": bool(T[k + i, k + j])},
                    checked=checked,
                )
    hits = np.argwhere(T[:k, :])
    if len(hits):
        i, j = (int(v) for v in hits[0])
        return CheckReport.fail("solver-argument", {"x": str(s.element(i)), "y": str(s.element(j))}, checked=checked)
    hits = np.argwhere(T[:, :k])
    if len(hits):
        i, j = (int(v) for v in hits[0])
        return CheckReport.fail(
            "solver-argument", {"x": str(s.element(i)), "y": str(s.element(j))}, checked=checked,
            pairs=int(T[:, :k].sum()),
        )
    return CheckReport.ok(checked=checked)


def verify_phi_sop2(s: IncidenceStructure, depth: int, variant: str = "literal") -> CheckReport:
    """The formula, with the parameter in the second slot, is an SOP2 witness up to ``depth``."""
    if depth < 1 or depth > s.depth - 1:
        raise InputError(f"depth must be in [1, {s.depth - 1}] so chains have a proper extension")
    T = s.phi_table(variant)
    k = s.n_solvers
    sol = {tuple(x): T[:, k + i] for i, x in enumerate(s.nodes)}
    checked = 0
    for leaf in leaves(depth, 2):
        checked += 1
        acc = np.ones(s.size, dtype=bool)
        for x in branch_chain(leaf):
            acc &= sol[tuple(x)]
        if not acc.any():
            return CheckReport.fail("chain", branch_chain(leaf), checked=checked)
    ns = [tuple(x) for x in all_nodes(depth, 2)]
    for a, b in itertools.combinations(ns, 2):
        if not comparable(a, b):
            checked += 1
            common = np.flatnonzero(sol[a] & sol[b])
            if len(common):
                return CheckReport.fail(
                    "incomparable-pair",
                    {"pair": [Node(a), Node(b)], "common": str(s.element(int(common[0])))},
                    checked=checked,
                )
    return CheckReport.ok(checked=checked)


@dataclass(frozen=True)
class ConjSearchResult:
    status: str  # "none", "witness", "budget"
    witness: dict | None
    steps: int
    candidates: int
    budget: int
    pruning: str

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": None
            if self.witness is None
            else {Node(k).bits(): [Node(x).bits() for x in v] for k, v in self.witness.items()},
            "steps": self.steps,
            "candidates": self.candidates,
            "budget": self.budget,
            "pruning": self.pruning,
        }


_POSITIONS = ((), (0,), (0, 0), (0, 1), (1,), (1, 0), (1, 1))
_PARENT = (-1, 0, 1, 1, 0, 4, 4)


def conjunction_search_inputs(s: IncidenceStructure, n_conj: int):
    """Candidate supports, their solver bitsets, the pair table over candidates and position incomparability."""
    if n_conj < 1:
        raise InputError("n_conj must be at least 1")
    P = pair_table(s)
    n = len(s.nodes)
    supports: list[tuple[int, ...]] = []
    for k in range(1, n_conj + 1):
        for combo in itertools.combinations(range(n), k):
            if all(P[i, j] for i, j in itertools.combinations(combo, 2)):
                if s.consistent([s.nodes[i] for i in combo]):
                    supports.append(combo)
    cand = []
    for sup in supports:
        acc = (1 << s.n_solvers) - 1
        for i in sup:
            acc &= s.node_masks[i]
        cand.append(acc)
    nc = len(cand)
    pair_ok = np.zeros((nc, nc), dtype=np.uint8)
    for i in range(nc):
        for j in range(i, nc):
            v = 1 if cand[i] & cand[j] else 0
            pair_ok[i, j] = pair_ok[j, i] = v
    incomp = np.array(
        [[1 if (q < p and not comparable(_POSITIONS[p], _POSITIONS[q])) else 0 for q in range(7)] for p in range(7)],
        dtype=np.uint8,
    )
    return supports, cand, pair_ok, incomp


def search_conjunction_sop2(
    s: IncidenceStructure, n_conj: int, budget: int = DEFAULT_BUDGET
) -> ConjSearchResult:
    """Search for an SOP2 pattern of height two for a conjunction of ``n_conj`` copies of R.

    A position gets a tuple of parameters; only its support matters, and a
    support with no common solver can never sit on a consistent chain, so
    candidates are the consistent supports of size at most ``n_conj``.
    Pairwise consistency is necessary for joint consistency, so supports are
    drawn from cliques of the pair table before the joint test.
    """
    supports, cand, pair_ok, incomp = conjunction_search_inputs(s, n_conj)
    nc = len(cand)
    res = kernels.conj_sop2_search(cand, pair_ok, _PARENT, incomp, budget)
    status = {kernels.STATUS_NONE: "none", kernels.STATUS_WITNESS: "witness", kernels.STATUS_BUDGET: "budget"}[
        res.status
    ]
    witness = None
    if res.status == kernels.STATUS_WITNESS:
        witness = {
            _POSITIONS[p]: tuple(s.nodes[i] for i in supports[c]) for p, c in enumerate(res.witness)
        }
    return ConjSearchResult(
        status,
        witness,
        res.steps,
        nc,
        budget,
        "chain running intersection nonempty; incomparable positions checked against the pair table",
    )


def check_conj_witness(s: IncidenceStructure, witness: dict) -> bool:
    """Re-check a witness returned by :func:`search_conjunction_sop2` from scratch."""
    for leaf in ((0, 0), (0, 1), (1, 0), (1, 1)):
        xs = [x for a in range(3) for x in witness[leaf[:a]]]
        if not s.consistent(xs):
            return False
    for p, q in itertools.combinations(_POSITIONS, 2):
        if not comparable(p, q) and s.consistent(list(witness[p]) + list(witness[q])):
            return False
    return True


def antichain_structure_ok(s: IncidenceStructure) -> bool:
    return all(is_antichain(x) for x in s.solvers)
