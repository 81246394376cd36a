"""Backend selection for the hot loops.

The compiled extension is used when it imports; ``TREEPROPS_PURE=1`` forces
the pure-Python fallback.  Callers pass solver sets as Python int bitsets and
get identical results from either backend.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels_py

STATUS_NONE = _kernels_py.STATUS_NONE
STATUS_WITNESS = _kernels_py.STATUS_WITNESS
STATUS_BUDGET = _kernels_py.STATUS_BUDGET

_compiled = None
if os.environ.get("TREEPROPS_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def compiled_available() -> bool:
    return _compiled is not None


def _words(bits: Sequence[int]) -> int:
    top = max((b.bit_length() for b in bits), default=0)
    return max(1, (top + 63) // 64)


def to_words(bits: Sequence[int], width: int | None = None) -> np.ndarray:
    """Pack Python int bitsets into a ``(n, W)`` uint64 array."""
    w = width or _words(bits)
    out = np.zeros((len(bits), w), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, b in enumerate(bits):
        for k in range(w):
            out[i, k] = (b >> (64 * k)) & mask
    return out


@dataclass(frozen=True)
class SearchResult:
    status: int
    witness: tuple[int, ...]
    steps: int


class _Backend:
    def __init__(self, name: str):
        if name == "cython" and _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        self.name = name

    def full_subset_scan(self, masks: Sequence[int], forbid: Sequence[int], full: int) -> tuple[int, int]:
        if len(masks) > 24:
            raise ValueError("full scan limited to 24 items")
        if self.name == "python":
            return _kernels_py.full_subset_scan(masks, forbid, full)
        w = _words(list(masks) + [full])
        return _compiled.full_subset_scan(
            to_words(masks, w), np.asarray(forbid, dtype=np.uint64), to_words([full], w)[0]
        )

    def independent_sets_scan(
        self, masks: Sequence[int], forbid: Sequence[int], max_size: int, full: int
    ) -> tuple[tuple[int, ...] | None, int]:
        if len(masks) > 64:
            raise ValueError("independent-set scan limited to 64 items")
        if self.name == "python":
            return _kernels_py.independent_sets_scan(masks, forbid, max_size, full)
        w = _words(list(masks) + [full])
        return _compiled.independent_sets_scan(
            to_words(masks, w), np.asarray(forbid, dtype=np.uint64), int(max_size), to_words([full], w)[0]
        )

    def conj_sop2_search(
        self,
        cand: Sequence[int],
        pair_ok: np.ndarray,
        parent: Sequence[int],
        incomp: np.ndarray,
        budget: int,
    ) -> SearchResult:
        if self.name == "python":
            st, wit, steps = _kernels_py.conj_sop2_search(
                cand, pair_ok.tolist(), list(parent), incomp.tolist(), budget
            )
        else:
            st, wit, steps = _compiled.conj_sop2_search(
                to_words(cand),
                np.ascontiguousarray(pair_ok, dtype=np.uint8),
                np.asarray(parent, dtype=np.int_),
                np.ascontiguousarray(incomp, dtype=np.uint8),
                int(budget),
            )
        return SearchResult(int(st), tuple(int(c) for c in wit), int(steps))


def backend(name: str | None = None) -> _Backend:
    return _Backend(name or BACKEND)


_default = _Backend(BACKEND)
full_subset_scan = _default.full_subset_scan
independent_sets_scan = _default.independent_sets_scan
conj_sop2_search = _default.conj_sop2_search
