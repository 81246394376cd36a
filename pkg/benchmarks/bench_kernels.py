"""Time the compiled kernels against the pure-Python fallback on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 3] [--json]
"""
from __future__ import annotations

import argparse
import json
import time

from treeprops import kernels
from treeprops.modelc import build_structure, conjunction_search_inputs
from treeprops.treecore import comparable
from treeprops.witness import PARENT


def _forbid(nodes):
    rows = []
    for a in nodes:
        m = 0
        for j, b in enumerate(nodes):
            if a != b and comparable(a, b):
                m |= 1 << j
        rows.append(m)
    return rows


def cases():
    c4, c5 = build_structure(4), build_structure(5)
    full4 = (1 << c4.n_solvers) - 1
    full5 = (1 << c5.n_solvers) - 1
    f4, f5 = _forbid([tuple(x) for x in c4.nodes]), _forbid([tuple(x) for x in c5.nodes])
    yield "full_subset_scan C_4 (2^15 sets)", lambda b: b.full_subset_scan(c4.node_masks, f4, full4)
    yield "independent_sets_scan C_5, size <= 4", lambda b: b.independent_sets_scan(c5.node_masks, f5, 4, full5)
    for s, k, budget in ((c4, 1, 10**8), (c4, 2, 10**8), (c5, 1, 10**8)):
        _, cand, pair_ok, incomp = conjunction_search_inputs(s, k)
        yield (
            f"conj_sop2_search C_{s.depth}, n_conj={k}",
            lambda b, cand=cand, pair_ok=pair_ok, incomp=incomp, budget=budget: b.conj_sop2_search(
                cand, pair_ok, PARENT, incomp, budget
            ),
        )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    names = ["python"] + (["cython"] if kernels.compiled_available() else [])
    rows = []
    for label, fn in cases():
        row = {"case": label}
        results = {}
        for name in names:
            b = kernels.backend(name)
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[name] = fn(b)
                best = min(best, time.perf_counter() - t0)
            row[name] = best
        row["agree"] = len({repr(r) for r in results.values()}) == 1
        if "cython" in row:
            row["speedup"] = row["python"] / max(row["cython"], 1e-9)
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    if "cython" not in names:
        print("compiled kernels unavailable; timing the fallback only")
    print(f"{'case':44} {'python s':>10} {'cython s':>10} {'speedup':>8}  agree")
    for r in rows:
        cy = f"{r['cython']:10.4f}" if "cython" in r else f"{'-':>10}"
        sp = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'-':>8}"
        print(f"{r['case']:44} {r['python']:10.4f} {cy} {sp}  {r['agree']}")


if __name__ == "__main__":
    main()
