"""Brute-force evaluation of first-order formulas over a finite structure.

A formula evaluates to a boolean array indexed by its free variables (in
sorted order).  Existentials over conjunctions are contracted with einsum
so that no intermediate array carries more axes than the widest conjunct.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Mapping

import numpy as np


class Formula:
    def free(self) -> frozenset[str]:
        raise NotImplementedError

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[str, ...]

    def free(self):
        return frozenset(self.args)


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str

    def free(self):
        return frozenset((self.left, self.right))


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def free(self):
        return self.body.free()


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]

    def free(self):
        return frozenset().union(*(p.free() for p in self.parts))


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]

    def free(self):
        return frozenset().union(*(p.free() for p in self.parts))


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def free(self):
        return self.body.free() - {self.var}


def R(*args: str) -> Rel:
    return Rel("R", tuple(args))


def exists(var: str, *parts: Formula) -> Exists:
    return Exists(var, parts[0] if len(parts) == 1 else And(tuple(parts)))


@dataclass(frozen=True)
class Table:
    vars: tuple[str, ...]
    data: np.ndarray  # bool, one axis per var

    def aligned(self, target: tuple[str, ...]) -> np.ndarray:
        """Broadcast to the axis order of ``target`` (a superset of vars)."""
        perm = sorted(range(len(self.vars)), key=lambda i: target.index(self.vars[i]))
        arr = np.transpose(self.data, perm) if self.vars else self.data
        have = [self.vars[i] for i in perm]
        shape = [1] * len(target)
        for v, n in zip(have, arr.shape):
            shape[target.index(v)] = n
        return arr.reshape(shape)


class FiniteStructure:
    """Universe ``range(size)`` with named relations given as boolean arrays."""

    def __init__(self, size: int, relations: Mapping[str, np.ndarray]):
        self.size = size
        self.relations = {k: np.asarray(v, dtype=bool) for k, v in relations.items()}
        for k, v in self.relations.items():
            if any(n != size for n in v.shape):
                raise ValueError(f"relation {k} has shape {v.shape}, universe {size}")

    def evaluate(self, f: Formula) -> Table:
        if isinstance(f, Rel):
            arr = self.relations[f.name]
            vs = sorted(set(f.args))
            if len(vs) == len(f.args):
                letters = "".join(string.ascii_letters[vs.index(a)] for a in f.args)
                out = "".join(string.ascii_letters[i] for i in range(len(vs)))
                return Table(tuple(vs), np.einsum(f"{letters}->{out}", arr))
            # repeated variable: take the diagonal
            letters = "".join(string.ascii_letters[vs.index(a)] for a in f.args)
            out = "".join(string.ascii_letters[i] for i in range(len(vs)))
            return Table(tuple(vs), np.einsum(f"{letters}->{out}", arr.astype(np.int8)).astype(bool))
        if isinstance(f, Eq):
            if f.left == f.right:
                return Table((f.left,), np.ones(self.size, dtype=bool))
            vs = tuple(sorted((f.left, f.right)))
            return Table(vs, np.eye(self.size, dtype=bool))
        if isinstance(f, Not):
            t = self.evaluate(f.body)
            return Table(t.vars, ~t.data)
        if isinstance(f, (And, Or)):
            tabs = [self.evaluate(p) for p in f.parts]
            vs = tuple(sorted(set().union(*(t.vars for t in tabs))))
            acc = tabs[0].aligned(vs)
            for t in tabs[1:]:
                acc = (acc & t.aligned(vs)) if isinstance(f, And) else (acc | t.aligned(vs))
            shape = tuple(self.size for _ in vs)
            return Table(vs, np.broadcast_to(acc, shape).copy())
        if isinstance(f, Exists):
            return self._exists(f)
        raise TypeError(f"unknown formula node {f!r}")

    def _exists(self, f: Exists) -> Table:
        parts = f.body.parts if isinstance(f.body, And) else (f.body,)
        inner = [p for p in parts if f.var in p.free()]
        outer = [p for p in parts if f.var not in p.free()]
        tabs = [self.evaluate(p) for p in inner]
        allv = sorted(set().union(*(t.vars for t in tabs)))
        letter = {v: string.ascii_letters[i] for i, v in enumerate(allv)}
        keep = tuple(v for v in allv if v != f.var)
        spec = ",".join("".join(letter[v] for v in t.vars) for t in tabs)
        spec += "->" + "".join(letter[v] for v in keep)
        counts = np.einsum(spec, *[t.data.astype(np.float32) for t in tabs], optimize=True)
        res = Table(keep, counts > 0)
        if not outer:
            return res
        rest = self.evaluate(And(tuple(outer)) if len(outer) > 1 else outer[0])
        vs = tuple(sorted(set(keep) | set(rest.vars)))
        data = np.broadcast_to(res.aligned(vs) & rest.aligned(vs), tuple(self.size for _ in vs)).copy()
        return Table(vs, data)

    def holds(self, f: Formula, assignment: Mapping[str, int]) -> bool:
        t = self.evaluate(f)
        return bool(t.data[tuple(assignment[v] for v in t.vars)])


def common_solver(u: str, v: str, w: str = "w") -> Exists:
    """``exists w (R(w, u) and R(w, v))``."""
    return exists(w, R(w, u), R(w, v))


def predecessor_formula(x: str = "x", y: str = "y", exclude_self: bool = False) -> Formula:
    """The "y lies strictly below x" formula over the incidence relation.

    Taken literally the inner witness ``z`` may equal ``x``; every parameter
    shares a solver with itself, so the last conjunct then follows from the
    first two.  ``exclude_self`` adds ``z != x``.
    """
    inner = [common_solver(x, "z", "w1"), Not(common_solver(y, "z", "w2"))]
    if exclude_self:
        inner.append(Not(Eq("z", x)))
    return And((Not(Eq(x, y)), Not(common_solver(x, y)), exists("z", *inner)))
