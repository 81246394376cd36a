# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics.

Solver bitsets arrive as ``uint64`` arrays of shape ``(n, W)``.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    ST_NONE = 0
    ST_WITNESS = 1
    ST_BUDGET = 2

STATUS_NONE = ST_NONE
STATUS_WITNESS = ST_WITNESS
STATUS_BUDGET = ST_BUDGET


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _ctz(uint64_t x) noexcept nogil:
    return __builtin_ctzll(x)


def full_subset_scan(uint64_t[:, ::1] masks, uint64_t[::1] forbid, uint64_t[::1] full):
    cdef Py_ssize_t m = masks.shape[0]
    cdef Py_ssize_t W = masks.shape[1]
    cdef int64_t size = (<int64_t>1) << m
    cdef uint64_t[:, ::1] acc = np.empty((size, W), dtype=np.uint64)
    cdef unsigned char[::1] indep = np.empty(size, dtype=np.uint8)
    cdef int64_t s, rest
    cdef int low
    cdef Py_ssize_t w
    cdef bint nonzero, ind
    for w in range(W):
        acc[0, w] = full[w]
    indep[0] = 1
    with nogil:
        for s in range(1, size):
            low = _ctz(<uint64_t>s)
            rest = s & (s - 1)
            nonzero = 0
            for w in range(W):
                acc[s, w] = acc[rest, w] & masks[low, w]
                if acc[s, w]:
                    nonzero = 1
            ind = indep[rest] and not (forbid[low] & <uint64_t>rest)
            indep[s] = ind
            if nonzero != ind:
                break
        else:
            s = -1
    if s == -1:
        return -1, size
    return s, s + 1


def independent_sets_scan(uint64_t[:, ::1] masks, uint64_t[::1] forbid, int max_size, uint64_t[::1] full):
    cdef Py_ssize_t m = masks.shape[0]
    cdef Py_ssize_t W = masks.shape[1]
    cdef int64_t visited = 1
    cdef Py_ssize_t w
    cdef bint nonzero = 0
    for w in range(W):
        if full[w]:
            nonzero = 1
    if not nonzero or max_size <= 0:
        return (() if not nonzero else None), visited
    # explicit stack: depth <= max_size, each level keeps next index and acc
    cdef int depth = 0
    cdef int *nxt = <int *>malloc((max_size + 1) * sizeof(int))
    cdef int *chosen = <int *>malloc((max_size + 1) * sizeof(int))
    cdef uint64_t *members = <uint64_t *>malloc((max_size + 1) * sizeof(uint64_t))
    cdef uint64_t[:, ::1] acc = np.empty((max_size + 1, W), dtype=np.uint64)
    cdef int j, k
    cdef bint failed = 0
    for w in range(W):
        acc[0, w] = full[w]
    members[0] = 0
    nxt[0] = 0
    try:
        with nogil:
            while depth >= 0:
                j = nxt[depth]
                if depth >= max_size or j >= m:
                    depth -= 1
                    continue
                nxt[depth] = j + 1
                if forbid[j] & members[depth]:
                    continue
                visited += 1
                nonzero = 0
                for w in range(W):
                    acc[depth + 1, w] = acc[depth, w] & masks[j, w]
                    if acc[depth + 1, w]:
                        nonzero = 1
                chosen[depth] = j
                if not nonzero:
                    failed = 1
                    depth += 1
                    break
                members[depth + 1] = members[depth] | ((<uint64_t>1) << j)
                nxt[depth + 1] = j + 1
                depth += 1
        if failed:
            return tuple(chosen[k] for k in range(depth)), visited
        return None, visited
    finally:
        free(nxt)
        free(chosen)
        free(members)


def conj_sop2_search(uint64_t[:, ::1] cand, unsigned char[:, ::1] pair_ok, long[::1] parent,
                     unsigned char[:, ::1] incomp, int64_t budget):
    cdef Py_ssize_t nc = cand.shape[0]
    cdef Py_ssize_t W = cand.shape[1]
    cdef Py_ssize_t npos = parent.shape[0]
    cdef uint64_t[:, ::1] acc = np.empty((npos, W), dtype=np.uint64)
    cdef long[::1] choice = np.zeros(npos, dtype=np.int_)
    cdef long[::1] nxt = np.zeros(npos, dtype=np.int_)
    cdef int64_t steps = 0
    cdef int p = 0, q, par, status = ST_NONE
    cdef long c
    cdef Py_ssize_t w
    cdef bint ok, nonzero
    with nogil:
        nxt[0] = 0
        while p >= 0:
            if p == npos:
                status = ST_WITNESS
                break
            c = nxt[p]
            if c >= nc:
                p -= 1
                continue
            nxt[p] = c + 1
            steps += 1
            if steps > budget:
                status = ST_BUDGET
                break
            par = parent[p]
            nonzero = 0
            for w in range(W):
                if par >= 0:
                    acc[p, w] = acc[par, w] & cand[c, w]
                else:
                    acc[p, w] = cand[c, w]
                if acc[p, w]:
                    nonzero = 1
            if not nonzero:
                continue
            ok = 1
            for q in range(p):
                if incomp[p, q] and pair_ok[c, choice[q]]:
                    ok = 0
                    break
            if not ok:
                continue
            choice[p] = c
            p += 1
            if p < npos:
                nxt[p] = 0
    if status == ST_WITNESS:
        return status, tuple(choice[q] for q in range(npos)), steps
    return status, (), steps
