"""Command-line entry point.

Exit codes: 0 pass/found, 1 fail/not found, 2 usage error, 3 invalid input
file, 4 resource or budget limit.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Any, Sequence

from . import acceptance
from .errors import InputError, ResourceError
from .modelc import (
    PHI_VARIANTS,
    build_structure,
    search_conjunction_sop2,
    structure_from_json,
    verify_phi_semantics,
    verify_phi_sop2,
    verify_prop62,
    verify_remark63,
    verify_remark64,
)
from .ramsey import Coloring, find_dense_color, find_mono_embedding
from .report import CheckReport, _jsonable
from .treecore import Node, enumerate_maximal_antichains, maximal_antichain_count
from .treemaps import NamedTreeMap, _at_embed, _at_from_ssop1, apply_map, gen_level_sets, map_table, verify_levelset_facts
from .witness import GridOracle, check_property, check_tp2, classify_subset, find_bad_pair, oracle_from_json, pull_back

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3, 4

EMBEDS = {"at_embed": _at_embed, "at_from_ssop1": _at_from_ssop1}


class InputFileError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFileError(f"cannot read {path}: {exc}") from None


def _from_file(path: str, loader):
    obj = _load_json(path)
    try:
        return loader(obj)
    except (InputError, KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputFileError(f"invalid input in {path}: {exc}") from None


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj: Any) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True) + "\n"


def _emit(args, payload: dict, text: str) -> None:
    payload = {"format": 1, **payload}
    out = _dump(payload) if args.json else text.rstrip("\n") + "\n"
    sys.stdout.write(out)


def _report_code(r: CheckReport) -> int:
    return EXIT_OK if r.passed else EXIT_FAIL


def _nodes_arg(text: str) -> list[Node]:
    parts = [p for p in text.replace(";", " ").split() if p]
    if len(parts) == 1 and "," in parts[0] and not parts[0].startswith("["):
        parts = parts[0].split(",")
    return [Node.parse(p) for p in parts]


# subcommands


def cmd_antichains(args) -> int:
    if args.count:
        n = maximal_antichain_count(args.depth)
        _emit(args, {"depth": args.depth, "count": n}, str(n))
        return EXIT_OK
    cat = enumerate_maximal_antichains(args.depth)
    lines = ["{" + ", ".join(Node(x).bits() for x in a) + "}" for a in cat]
    payload = {"depth": args.depth, "count": len(cat), "antichains": [list(a) for a in cat]}
    if args.out:
        write_atomic(args.out, _dump(payload))
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_structure_build(args) -> int:
    s = build_structure(args.depth)
    write_atomic(args.out, _dump(s.to_json()))
    _emit(args, {"depth": s.depth, "solvers": s.n_solvers, "params": s.n_params, "out": args.out},
          f"wrote C_{s.depth}: {s.n_solvers} solvers, {s.n_params} parameters -> {args.out}")
    return EXIT_OK


def cmd_structure_verify(args) -> int:
    s = _from_file(args.inp, structure_from_json)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    results: dict[str, CheckReport] = {}
    for c in checks:
        if c == "prop62":
            results[c] = verify_prop62(s, args.mode)
        elif c == "remark63":
            results[c] = verify_remark63(s)
        elif c == "remark64":
            results[c] = verify_remark64(s, args.max_size)
        elif c == "phi":
            sem = verify_phi_semantics(s, args.variant)
            results["phi-semantics"] = sem
            if s.depth >= 2:
                results["phi-sop2"] = verify_phi_sop2(s, s.depth - 1, args.variant)
        else:
            raise InputError(f"unknown check {c!r}; choose from prop62, remark63, remark64, phi")
    ok = all(r.passed for r in results.values())
    text = "\n".join(f"{k}: {r}" for k, r in results.items())
    _emit(args, {"passed": ok, "checks": {k: r.to_json() for k, r in results.items()}}, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_structure_search(args) -> int:
    s = _from_file(args.inp, structure_from_json)
    r = search_conjunction_sop2(s, args.conj, args.budget)
    payload = {
        "status": r.status,
        "steps": r.steps,
        "candidates": r.candidates,
        "budget": r.budget,
        "witness": None if r.witness is None else {Node(p).bits(): [list(x) for x in v] for p, v in r.witness.items()},
    }
    text = f"{r.status} after {r.steps} steps ({r.candidates} candidate supports)"
    if r.witness is not None:
        text += "\n" + "\n".join(
            f"  {Node(p).bits()}: {' '.join(Node(x).bits() for x in v)}" for p, v in r.witness.items()
        )
    _emit(args, payload, text)
    return {"witness": EXIT_OK, "none": EXIT_FAIL, "budget": EXIT_RESOURCE}[r.status]


def _grid_from_json(obj: dict) -> GridOracle:
    if obj.get("kind") != "pullback" or obj.get("map") != "tp2_from_at":
        raise InputError("tp2 needs a pullback oracle with map tp2_from_at and an antichain field")
    m = NamedTreeMap.of("tp2_from_at", [Node.parse(x) for x in obj["antichain"]])
    return pull_back(oracle_from_json(obj["inner"]), m)


def cmd_check(args) -> int:
    if args.property.strip().lower() == "tp2":
        r = check_tp2(_from_file(args.oracle, _grid_from_json), args.m)
        _emit(args, {"report": r.to_json()}, str(r))
        return _report_code(r)
    o = _from_file(args.oracle, oracle_from_json)
    r = check_property(o, args.property, args.depth, args.mode)
    _emit(args, {"report": r.to_json()}, str(r))
    return _report_code(r)


def cmd_map_apply(args) -> int:
    anti = _nodes_arg(args.antichain) if args.antichain else ()
    m = NamedTreeMap.of(args.name, anti)
    if m.on_nodes:
        arg = Node.parse(args.node)
    else:
        try:
            arg = tuple(int(v) for v in args.node.split(","))
        except ValueError:
            raise InputError("grid maps take a coordinate i,j") from None
    y = apply_map(m, arg)
    _emit(args, {"map": m.name.value, "input": list(arg), "image": list(y)}, y.bits())
    return EXIT_OK


def cmd_map_table(args) -> int:
    m = NamedTreeMap.of(args.name)
    if not m.on_nodes:
        raise InputError("grid maps have no node table")
    t = map_table(m, args.depth)
    payload = {"map": m.name.value, "depth": args.depth, "table": {x.bits(): list(y) for x, y in t.items()}}
    if args.out:
        write_atomic(args.out, _dump(payload))
    _emit(args, payload, "\n".join(f"{x.bits()} -> {y.bits()}" for x, y in t.items()))
    return EXIT_OK


def cmd_levelsets(args) -> int:
    embed = EMBEDS[args.embed]
    if args.verify:
        try:
            i_max, k_max = (int(v) for v in args.verify.split(","))
        except ValueError:
            raise InputError("--verify takes i_max,k_max") from None
        r = verify_levelset_facts(i_max, k_max, embed=embed)
        _emit(args, {"report": r.to_json()}, str(r))
        return _report_code(r)
    pre = Node.parse(args.prefix) if args.prefix else None
    ls = gen_level_sets(args.i, args.k, pre, embed=embed)
    text = "\n".join(
        [
            f"L    = {' '.join(x.bits() for x in ls.L)}",
            f"1_xi = {' '.join(x.bits() for x in ls.one_xi)}",
            f"M    = {' '.join(x.bits() for x in ls.M)}",
            f"m    = {ls.m.bits()}",
        ]
    )
    _emit(args, {"levelsets": ls.to_json()}, text)
    return EXIT_OK


def cmd_mono_embed(args) -> int:
    c = _from_file(args.coloring, Coloring.from_json)
    h = find_mono_embedding(c, args.height, args.branching, args.budget)
    if h is None:
        _emit(args, {"found": False, "embedding": None}, "none")
        return EXIT_FAIL
    _emit(args, {"found": True, "embedding": {k.bits(): list(v) for k, v in h.items()}},
          "\n".join(f"{k.bits()} -> {v.bits()}" for k, v in h.items()))
    return EXIT_OK


def cmd_mono_dense(args) -> int:
    c = _from_file(args.coloring, Coloring.from_json)
    r = find_dense_color(c, args.margin)
    if r is None:
        _emit(args, {"found": False}, "none")
        return EXIT_FAIL
    nu, j = r
    _emit(args, {"found": True, "node": list(nu), "color": j}, f"{nu.bits()} {j}")
    return EXIT_OK


def cmd_classify(args) -> int:
    xs = _nodes_arg(args.nodes)
    cls = classify_subset(xs)
    bad = find_bad_pair(xs)
    payload = {"class": cls.value, "bad_pair": None if bad is None else [list(bad[1]), list(bad[2])]}
    text = cls.value + ("" if bad is None else f" ({bad[1].bits()}, {bad[2].bits()})")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_selftest(args) -> int:
    suite = acceptance.CRITERIA if args.full else acceptance.QUICK
    if args.only:
        keys = [k.strip() for k in args.only.split(",")]
        suite = tuple(c for c in suite if c.key in keys)
        if not suite:
            raise InputError(f"no criteria match {args.only!r}")
    outs = acceptance.run_suite(suite, args.seed)
    failed = [o for o in outs if not o.passed]
    payload = {
        "level": "full" if args.full else "quick",
        "seed": args.seed,
        "passed": not failed,
        "first_failure": failed[0].key if failed else None,
        "criteria": [o.to_json() for o in outs],
    }
    text = "\n".join(o.line() for o in outs)
    if failed:
        text += f"\nfirst failing criterion: {failed[0].key} ({failed[0].title})"
    _emit(args, payload, text)
    return EXIT_FAIL if failed else EXIT_OK


# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report on stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    p = _Parser(prog="treeprops", description="Finite tree-property checkers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("antichains", parents=[common], help="enumerate maximal antichains")
    a.add_argument("--depth", type=int, required=True)
    a.add_argument("--count", action="store_true")
    a.add_argument("--out")
    a.set_defaults(func=cmd_antichains)

    s = sub.add_parser("structure", help="build and verify the antichain incidence structure")
    ssub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    b = ssub.add_parser("build", parents=[common])
    b.add_argument("--depth", type=int, required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_structure_build)
    v = ssub.add_parser("verify", parents=[common])
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--checks", default="prop62,remark63,remark64,phi")
    v.add_argument("--mode", choices=("full", "reduced"), default="reduced")
    v.add_argument("--max-size", type=int, default=4)
    v.add_argument("--variant", choices=PHI_VARIANTS, default="literal")
    v.set_defaults(func=cmd_structure_verify)
    se = ssub.add_parser("search-sop2", parents=[common])
    se.add_argument("--in", dest="inp", required=True)
    se.add_argument("--conj", type=int, default=1)
    se.add_argument("--budget", type=int, default=10**8)
    se.set_defaults(func=cmd_structure_search)

    c = sub.add_parser("check", parents=[common], help="check a witness property on an oracle")
    c.add_argument("--oracle", required=True)
    c.add_argument("--property", required=True)
    c.add_argument("--depth", type=int, default=3)
    c.add_argument("--mode", choices=("full", "reduced"), default="full")
    c.add_argument("--m", type=int, default=None, help="grid size for tp2")
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("map", help="apply named tree maps")
    msub = m.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ma = msub.add_parser("apply", parents=[common])
    ma.add_argument("--name", required=True)
    ma.add_argument("--node", required=True)
    ma.add_argument("--antichain", help="antichain parameter for tp2_from_at, e.g. 00,01,1")
    ma.set_defaults(func=cmd_map_apply)
    mt = msub.add_parser("table", parents=[common])
    mt.add_argument("--name", required=True)
    mt.add_argument("--depth", type=int, required=True)
    mt.add_argument("--out")
    mt.set_defaults(func=cmd_map_table)

    ls = sub.add_parser("levelsets", parents=[common], help="level sets of the embedding")
    ls.add_argument("--i", type=int, default=0)
    ls.add_argument("--k", type=int, default=0)
    ls.add_argument("--prefix")
    ls.add_argument("--embed", choices=sorted(EMBEDS), default="at_embed")
    ls.add_argument("--verify", metavar="I_MAX,K_MAX")
    ls.set_defaults(func=cmd_levelsets)

    mo = sub.add_parser("mono", help="monochromatic searches")
    mosub = mo.add_subparsers(dest="action", required=True, parser_class=_Parser)
    me = mosub.add_parser("embed", parents=[common])
    me.add_argument("--coloring", required=True)
    me.add_argument("--height", type=int, required=True)
    me.add_argument("--branching", type=int, default=2)
    me.add_argument("--budget", type=int, default=10**7)
    me.set_defaults(func=cmd_mono_embed)
    md = mosub.add_parser("dense", parents=[common])
    md.add_argument("--coloring", required=True)
    md.add_argument("--margin", type=int, default=0)
    md.set_defaults(func=cmd_mono_dense)

    cl = sub.add_parser("classify", parents=[common], help="chain / bad pair / neither")
    cl.add_argument("--nodes", required=True, help="comma-separated nodes, e.g. 0,10,11")
    cl.set_defaults(func=cmd_classify)

    st = sub.add_parser("selftest", parents=[common], help="run the built-in suites")
    g = st.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true")
    g.add_argument("--full", action="store_true")
    st.add_argument("--only", help="comma-separated criterion keys")
    st.set_defaults(func=cmd_selftest)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
