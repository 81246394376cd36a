"""Acceptance criteria and the quick smoke suite, shared by the CLI and the tests.

Each check returns ``(passed, detail)``; the runner adds timing and fails a
check that overruns its bound.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .modelc import (
    build_structure,
    check_conj_witness,
    search_conjunction_sop2,
    verify_embedding_chain,
    verify_phi_semantics,
    verify_phi_sop2,
    verify_prop62,
    verify_remark63,
    verify_remark64,
)
from .ramsey import Coloring, find_dense_color, find_mono_embedding, is_monochromatic
from .similarity import SimilarityLevel, check_remark34, graded_equiv, random_gamma_pair, str_similar
from .treecore import Node, all_nodes, enumerate_maximal_antichains, is_antichain, lex_less, meet
from .treemaps import (
    NamedTreeMap,
    apply_map,
    check_remark47,
    gen_level_sets,
    map_table,
    random_remark47_instance,
    validate_successor_preserving,
    verify_levelset_facts,
)
from .witness import (
    Shape,
    check_property,
    check_tp2,
    find_pattern_depth2,
    parse_property,
    pull_back,
    random_solution_oracle,
    synthetic,
)

Check = Callable[[int], tuple[bool, str]]


@dataclass(frozen=True)
class Criterion:
    key: str
    title: str
    bound: float  # seconds
    run: Check


@dataclass(frozen=True)
class Outcome:
    key: str
    title: str
    passed: bool
    elapsed: float
    bound: float
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} [{self.key}] {self.title} ({self.elapsed:.2f}s / {self.bound:g}s): {self.detail}"

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "title": self.title,
            "passed": self.passed,
            "bound": self.bound,
            "detail": self.detail,
        }


def run_criterion(c: Criterion, seed: int = 0) -> Outcome:
    t0 = time.perf_counter()
    try:
        ok, detail = c.run(seed)
    except Exception as exc:  # a crash is a failed criterion, not a crashed suite
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if ok and dt > c.bound:
        ok, detail = False, f"{detail}; over time bound"
    return Outcome(c.key, c.title, ok, dt, c.bound, detail)


def run_suite(criteria: Iterable[Criterion], seed: int = 0) -> list[Outcome]:
    return [run_criterion(c, seed) for c in criteria]


# independent oracles


def brute_maximal_antichains(depth: int) -> int:
    """Count maximal antichains by scanning every subset of the tree."""
    ns = [tuple(x) for x in all_nodes(depth, 2)]
    anti = [s for r in range(1, len(ns) + 1) for s in itertools.combinations(ns, r) if is_antichain(s)]
    sets = [frozenset(s) for s in anti]
    return sum(1 for a in sets if not any(a < b for b in sets))


def _terms(n: int, rounds: int = 2) -> list:
    terms: list = [("v", i) for i in range(n)]
    for _ in range(rounds):
        terms = terms + [("m", a, b) for a in terms for b in terms]
    return terms


def qf_type_by_terms(xs: Sequence[Sequence[int]], rounds: int = 2) -> tuple[bool, ...]:
    """Truth values of all atoms ``s = t``, ``s <= t``, ``s <lex t`` over nested meet terms."""
    cache: dict = {}

    def ev(t):
        if t in cache:
            return cache[t]
        v = Node(xs[t[1]]) if t[0] == "v" else meet(ev(t[1]), ev(t[2]))
        cache[t] = v
        return v

    vals = [ev(t) for t in _terms(len(xs), rounds)]
    out = []
    for a in vals:
        for b in vals:
            out += [a == b, tuple(b[: len(a)]) == tuple(a), lex_less(a, b)]
    return tuple(out)


# criteria


def _c1(seed: int = 0) -> tuple[bool, str]:
    want = [1, 2, 5, 26, 677]
    got = [len(enumerate_maximal_antichains(n)) for n in range(1, 6)]
    brute = [brute_maximal_antichains(n) for n in range(1, 4)]
    rec = [1]
    for _ in range(4):
        rec.append(rec[-1] ** 2 + 1)
    ok = got == want and brute == want[:3] and rec == want
    return ok, f"counts {got}, subset scan {brute}, recursion {rec}"


def _c2(seed: int = 0) -> tuple[bool, str]:
    t0 = time.perf_counter()
    full = verify_prop62(build_structure(4), "full")
    t1 = time.perf_counter()
    red = verify_prop62(build_structure(5), "reduced")
    t2 = time.perf_counter()
    slow = [name for name, dt, cap in (("full", t1 - t0, 60), ("reduced", t2 - t1, 30)) if dt > cap]
    ok = bool(full) and bool(red) and not slow
    detail = f"C_4 full: {full}; C_5 reduced: {red}"
    return ok, detail + (f"; over bound: {', '.join(slow)}" if slow else "")


def _c3(seed: int = 0) -> tuple[bool, str]:
    r = verify_remark63(build_structure(4))
    return bool(r), str(r)


def _c4(seed: int = 0) -> tuple[bool, str]:
    r = verify_remark64(build_structure(4), 4)
    return bool(r), str(r)


def _c5(seed: int = 0) -> tuple[bool, str]:
    s = build_structure(5)
    sem = verify_phi_semantics(s)
    sop = verify_phi_sop2(s, 4)
    strict = (verify_phi_semantics(s, "strict"), verify_phi_sop2(s, 4, "strict"))
    detail = f"semantics: {sem}; sop2: {sop}; with z != x: semantics {strict[0]}, sop2 {strict[1]}"
    return bool(sem) and bool(sop), detail


def _c6(seed: int = 0) -> tuple[bool, str]:
    s = build_structure(4)
    one = search_conjunction_sop2(s, 1)
    two = search_conjunction_sop2(s, 2)
    detail = f"n_conj=1: {one.status} after {one.steps} steps; n_conj=2: {two.status} after {two.steps} steps"
    if two.witness is not None:
        shown = {Node(p).bits(): [Node(x).bits() for x in v] for p, v in two.witness.items()}
        detail += f" (witness {shown}, recheck {check_conj_witness(s, two.witness)})"
    return one.status == "none" and two.status != "witness", detail


def _c7(seed: int = 0) -> tuple[bool, str]:
    parts = []
    ok = True
    for rule, mname, prop in (("atp", "sop1_from_at", "sop1"), ("free", "at_from_ssop1", "atp"), ("atp", "ssop1_from_at", "ssop1")):
        m = NamedTreeMap.of(mname)
        inner = synthetic(rule, m.image_length(3) + 1)
        r = check_property(pull_back(inner, m, 3), prop, 3, "full")
        ok &= bool(r)
        parts.append(f"{rule}<-{mname} {prop}: {r.passed}")
    grid_map = NamedTreeMap.of("tp2_from_at", [Node.parse(x) for x in ("00", "01", "1")])
    grid = pull_back(synthetic("atp", grid_map.image_length(0) + 1), grid_map)
    r = check_tp2(grid, 3)
    ok &= bool(r)
    parts.append(f"atp<-tp2_from_at tp2: {r.passed}")
    return ok, "; ".join(parts)


def _c8(seed: int = 0) -> tuple[bool, str]:
    a = find_pattern_depth2(synthetic("atp", 4), Shape.SOP2)
    b = find_pattern_depth2(synthetic("chain", 4), Shape.ANTICHAIN)
    pa = find_pattern_depth2(synthetic("atp", 4), Shape.ANTICHAIN)
    pb = find_pattern_depth2(synthetic("chain", 4), Shape.SOP2)
    ok = a is None and b is None and pa is not None and pb is not None
    return ok, f"atp/sop2 {a}; chain/antichain {b}; controls found {pa is not None}, {pb is not None}"


def _c9(seed: int = 0) -> tuple[bool, str]:
    ns = all_nodes(3, 2)
    tuples = list(itertools.product(ns, repeat=2))
    for a in tuples:
        for b in tuples:
            g = graded_equiv(SimilarityLevel.GAMMA, a, b)
            be = graded_equiv(SimilarityLevel.BETA, a, b)
            al = graded_equiv(SimilarityLevel.ALPHA, a, b)
            if (g and not be) or (be and not al):
                return False, f"implication broken at {a}, {b}"
    types = {t: qf_type_by_terms(t) for t in tuples}
    for a in tuples:
        for b in tuples:
            if str_similar(a, b) != (types[a] == types[b]):
                return False, f"str_similar disagrees with term oracle at {a}, {b}"
    rng = random.Random(seed)
    for i in range(1000):
        a, b = random_gamma_pair(rng)
        r = check_remark34(a, b)
        if not r:
            return False, f"pair {i}: {r}"
    return True, f"{len(tuples) ** 2} tuple pairs, 1000 random gamma pairs (seed {seed})"


def _c10(seed: int = 0) -> tuple[bool, str]:
    beta = validate_successor_preserving(map_table(NamedTreeMap.of("beta_from_gamma"), 4), 4)
    at = validate_successor_preserving(map_table(NamedTreeMap.of("at_embed"), 4), 4)
    rng = random.Random(seed)
    for i in range(1000):
        r = check_remark47(*random_remark47_instance(rng, 6))
        if not r:
            return False, f"instance {i}: {r}"
    ok = bool(beta) and not at and at.clause == "premise"
    return ok, f"beta_from_gamma: {beta}; at_embed: {at}; 1000 instances pass"


def _c11(seed: int = 0) -> tuple[bool, str]:
    facts = verify_levelset_facts(4, 4)
    m23 = gen_level_sets(2, 3).m
    want = tuple(apply_map("at_embed", (0, 0))) + (1, 1, 1)
    ok = bool(facts) and tuple(m23) == want == tuple(Node.parse("1001001111"))
    return ok, f"facts: {facts}; m_2^3 = {m23}"


def _c13(seed: int = 0) -> tuple[bool, str]:
    cases = [
        ("constant", Coloring(4, 2), 3, True),
        ("parity", Coloring.from_function(4, 2, lambda x: len(x) % 2), 2, True),
        ("first-symbol", Coloring.from_function(4, 2, lambda x: x[0] if x else 2), 2, True),
        ("three-color", Coloring(2, 2, {"e": 0, "0": 1, "1": 2}), 2, False),
    ]
    parts = []
    for name, col, n, expect in cases:
        h = find_mono_embedding(col, n, 2)
        if (h is not None) != expect:
            return False, f"{name}: expected {'embedding' if expect else 'none'}"
        if h is not None:
            v = validate_successor_preserving(h, n, 2)
            if not v or not is_monochromatic(col, h):
                return False, f"{name}: returned map fails recheck ({v})"
        parts.append(f"{name}: {'found' if h else 'none'}")
    return True, "; ".join(parts)


def _c12(seed: int = 0) -> tuple[bool, str]:
    rng = random.Random(seed)
    astr2 = parse_property("astr:sop2:0,1")
    astr1 = parse_property("astr:tp1:0,1")
    verdicts = []
    for i in range(20):
        o = random_solution_oracle(rng, 3, 3)
        a, b = check_property(o, "sop2", 3).passed, check_property(o, astr2, 3).passed
        c, d = check_property(o, "weak_ktp1:2", 3).passed, check_property(o, astr1, 3).passed
        if a != b or c != d:
            return False, f"oracle {i}: sop2 {a} vs astr {b}; weak 2-tp1 {c} vs astr {d}"
        verdicts.append(a)
    return True, f"seed {seed}: 20 oracles agree ({sum(verdicts)} pass, {20 - sum(verdicts)} fail)"


CRITERIA: tuple[Criterion, ...] = (
    Criterion("1", "maximal-antichain counts", 5, _c1),
    Criterion("2", "consistency equals antichain on C_4/C_5", 90, _c2),
    Criterion("3", "no forbidden 4-pattern on C_4", 30, _c3),
    Criterion("4", "small inconsistent sets contain a comparable pair", 60, _c4),
    Criterion("5", "predecessor formula semantics and SOP2", 60, _c5),
    Criterion("6", "no height-two SOP2 for short conjunctions", 600, _c6),
    Criterion("7", "map transport suites", 40, _c7),
    Criterion("8", "depth-two pattern searches", 30, _c8),
    Criterion("9", "similarity suite", 60, _c9),
    Criterion("10", "successor-preserving maps and graded transfer", 60, _c10),
    Criterion("11", "level-set facts and m_2^3", 5, _c11),
    Criterion("12", "checker equivalences on random oracles", 60, _c12),
    Criterion("13", "monochromatic embeddings", 30, _c13),
)


def criterion(key: str) -> Criterion:
    for c in CRITERIA:
        if c.key == key:
            return c
    raise KeyError(key)


# quick suite: trivial invariants and depth <= 3 exhaustives


def _q_counts(seed: int = 0) -> tuple[bool, str]:
    got = [len(enumerate_maximal_antichains(n)) for n in (1, 2, 3)]
    brute = [brute_maximal_antichains(n) for n in (1, 2, 3)]
    return got == brute == [1, 2, 5], f"{got} vs subset scan {brute}"


def _q_structure(seed: int = 0) -> tuple[bool, str]:
    s = build_structure(3)
    rs = [verify_prop62(s, "full"), verify_remark63(s), verify_remark64(s, 4), verify_embedding_chain(3)]
    return all(rs), "; ".join(str(r) for r in rs)


def _q_maps(seed: int = 0) -> tuple[bool, str]:
    got = {
        "at_embed(00)": apply_map("at_embed", Node.parse("00")).bits(),
        "sop1_from_at(10)": apply_map("sop1_from_at", Node.parse("10")).bits(),
    }
    want = {"at_embed(00)": "1001001", "sop1_from_at(10)": "00111"}
    return got == want, str(got)


def _q_witness(seed: int = 0) -> tuple[bool, str]:
    rs = [
        check_property(synthetic("atp", 3), "atp", 3, "full"),
        check_property(synthetic("chain", 3), "sop2", 3, "full"),
        check_property(synthetic("free", 3), "ssop1", 3, "full"),
        check_property(synthetic("atp", 3), "sop1", 3, "full"),
    ]
    ok = [bool(r) for r in rs] == [True, True, True, False]
    return ok, "; ".join(str(r) for r in rs)


def _q_ramsey(seed: int = 0) -> tuple[bool, str]:
    h = find_mono_embedding(Coloring(4, 2), 3, 2)
    identity = h is not None and all(k == v for k, v in h.items())
    dense = find_dense_color(Coloring(3, 2, default=1))
    return identity and dense == (Node(()), 1), f"identity {identity}, dense {dense}"


QUICK: tuple[Criterion, ...] = (
    Criterion("q-antichains", "catalog counts up to depth 3", 5, _q_counts),
    Criterion("q-structure", "C_3 consistency checks", 10, _q_structure),
    Criterion("q-maps", "named map values", 2, _q_maps),
    Criterion("q-witness", "synthetic oracle verdicts at depth 3", 5, _q_witness),
    Criterion("q-ramsey", "trivial colorings", 2, _q_ramsey),
)
