# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels (see _pure.py for the
reference semantics; both backends must produce identical results)."""

import numpy as np
cimport numpy as cnp
from libcpp.vector cimport vector
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()

NAME = "cython"

cdef int64_t _INF = (<int64_t>1) << 40


def levenshtein_full(cnp.ndarray[cnp.uint8_t, ndim=1] a,
                     cnp.ndarray[cnp.uint8_t, ndim=1] b):
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0]
    if n == 0 or m == 0:
        return abs(n - m)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prev = np.arange(m + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cur = np.empty(m + 1, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef int64_t c, best
    cdef uint8_t ai
    for i in range(1, n + 1):
        ai = a[i - 1]
        cur[0] = i
        for j in range(1, m + 1):
            c = prev[j - 1] + (0 if b[j - 1] == ai else 1)
            if prev[j] + 1 < c:
                c = prev[j] + 1
            if cur[j - 1] + 1 < c:
                c = cur[j - 1] + 1
            cur[j] = c
        prev, cur = cur, prev
    return int(prev[m])


def levenshtein_banded(cnp.ndarray[cnp.uint8_t, ndim=1] a,
                       cnp.ndarray[cnp.uint8_t, ndim=1] b,
                       band):
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0]
    if n == 0 or m == 0:
        return abs(n - m)
    cdef int64_t bd = band
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prev = np.full(m + 1, _INF, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cur = np.full(m + 1, _INF, dtype=np.int64)
    cdef Py_ssize_t i, j, lo, hi
    cdef int64_t c, d
    cdef uint8_t ai
    for j in range(min(bd, m) + 1):
        prev[j] = j
    for i in range(1, n + 1):
        ai = a[i - 1]
        lo = i - bd if i - bd > 1 else 1
        hi = i + bd if i + bd < m else m
        cur[lo - 1] = i if (lo == 1 and i <= bd) else _INF
        for j in range(lo, hi + 1):
            c = prev[j - 1] + (0 if b[j - 1] == ai else 1)
            if prev[j] + 1 < c:
                c = prev[j] + 1
            if cur[j - 1] + 1 < c:
                c = cur[j - 1] + 1
            cur[j] = c
        if hi < m:
            cur[hi + 1] = _INF
        prev, cur = cur, prev
    d = prev[m]
    return int(d) if d <= bd else int(bd) + 1


def mutate_apply(cnp.ndarray[cnp.uint8_t, ndim=1] codes,
                 cnp.ndarray[cnp.uint8_t, ndim=1] kinds,
                 cnp.ndarray[cnp.float64_t, ndim=1] u_pos,
                 cnp.ndarray[cnp.uint8_t, ndim=1] ins_bases,
                 cnp.ndarray[cnp.uint8_t, ndim=1] sub_offsets):
    # Chunked buffer: uniform-position inserts/deletes stay O(chunk)
    # instead of O(total), which matters at megabase scale.
    cdef Py_ssize_t CHUNK = 4096
    cdef vector[vector[uint8_t]] chunks
    cdef vector[uint8_t] piece
    cdef Py_ssize_t n = codes.shape[0]
    cdef Py_ssize_t i, e, ci, off, pos, cur, applied = 0
    cdef int64_t target
    i = 0
    while i < n:
        piece.clear()
        for off in range(i, min(i + CHUNK, n)):
            piece.push_back(codes[off])
        chunks.push_back(piece)
        i += CHUNK
    cur = n
    cdef uint8_t kind
    for e in range(kinds.shape[0]):
        kind = kinds[e]
        if kind == 0:  # deletion
            if cur == 0:
                continue
            target = <int64_t>(u_pos[e] * cur)
            ci, off = _locate(chunks, target)
            chunks[ci].erase(chunks[ci].begin() + off)
            cur -= 1
        elif kind == 1:  # insertion
            target = <int64_t>(u_pos[e] * (cur + 1))
            ci, off = _locate_ins(chunks, target)
            if chunks[ci].size() >= 2 * CHUNK:
                _split(chunks, ci)
                if off > <Py_ssize_t>chunks[ci].size():
                    off -= chunks[ci].size()
                    ci += 1
            chunks[ci].insert(chunks[ci].begin() + off, ins_bases[e])
            cur += 1
        else:  # substitution
            if cur == 0:
                continue
            target = <int64_t>(u_pos[e] * cur)
            ci, off = _locate(chunks, target)
            chunks[ci][off] = (chunks[ci][off] + sub_offsets[e]) % 4
        applied += 1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.empty(cur, dtype=np.uint8)
    i = 0
    for ci in range(<Py_ssize_t>chunks.size()):
        for off in range(<Py_ssize_t>chunks[ci].size()):
            out[i] = chunks[ci][off]
            i += 1
    return out, applied


cdef inline (Py_ssize_t, Py_ssize_t) _locate(vector[vector[uint8_t]]& chunks,
                                             int64_t target):
    cdef Py_ssize_t ci = 0
    while target >= <int64_t>chunks[ci].size():
        target -= chunks[ci].size()
        ci += 1
    return ci, <Py_ssize_t>target


cdef inline (Py_ssize_t, Py_ssize_t) _locate_ins(vector[vector[uint8_t]]& chunks,
                                                 int64_t target):
    # Insert position may equal the total length (append); land it at
    # the end of the last chunk.
    cdef Py_ssize_t ci = 0, last = chunks.size() - 1
    while ci < last and target > <int64_t>chunks[ci].size():
        target -= chunks[ci].size()
        ci += 1
    return ci, <Py_ssize_t>target


cdef void _split(vector[vector[uint8_t]]& chunks, Py_ssize_t ci):
    cdef Py_ssize_t half = chunks[ci].size() // 2
    cdef vector[uint8_t] tail
    cdef Py_ssize_t j
    for j in range(half, <Py_ssize_t>chunks[ci].size()):
        tail.push_back(chunks[ci][j])
    chunks[ci].resize(half)
    chunks.insert(chunks.begin() + ci + 1, tail)


def accumulate_phasors(cnp.ndarray[cnp.int64_t, ndim=1] codes,
                       cnp.ndarray[cnp.complex128_t, ndim=2] phases,
                       fold_dim):
    cdef Py_ssize_t m = phases.shape[0], n = codes.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros(
        (m, <Py_ssize_t>fold_dim), dtype=np.complex128)
    cdef Py_ssize_t k, loc
    for k in range(m):
        for loc in range(n):
            out[k, codes[loc]] = out[k, codes[loc]] + phases[k, loc]
    return out
