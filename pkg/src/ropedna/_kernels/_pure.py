"""Pure-python (numpy) implementations of the hot kernels.

These are the reference implementations; the Cython module `_ckern`
mirrors their semantics exactly and is preferred when available.
"""
from __future__ import annotations

import numpy as np

NAME = "pure"

_INF = np.int64(1) << 40

# mutation edit kinds
DEL, INS, SUB = 0, 1, 2


def _dp_rows(a: np.ndarray, b: np.ndarray, band: int) -> int:
    """Two-row Levenshtein DP, vectorized per row.

    The left-neighbor dependency is resolved with the standard
    prefix-min trick: cur[j] = min_k<=j (M[k] + (j - k)).
    Cells outside the diagonal band are pinned to a large sentinel.
    """
    n, m = len(a), len(b)
    jj = np.arange(m + 1, dtype=np.int64)
    prev = jj.copy()
    banded = band < n + m
    if banded:
        prev[jj > band] = _INF
    v = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cost = (b != a[i - 1]).astype(np.int64)
        np.minimum(prev[:-1] + cost, prev[1:] + 1, out=v[1:])
        v[0] = i if i <= band else _INF
        cur = np.minimum.accumulate(v - jj) + jj
        if banded:
            cur[np.abs(i - jj) > band] = _INF
        prev = cur
    d = prev[m]
    return int(min(d, _INF))


def levenshtein_full(a: np.ndarray, b: np.ndarray) -> int:
    if len(a) == 0 or len(b) == 0:
        return abs(len(a) - len(b))
    return _dp_rows(a, b, len(a) + len(b))


def levenshtein_banded(a: np.ndarray, b: np.ndarray, band: int) -> int:
    """DP value restricted to |i-j| <= band; >= the true distance.

    Returns a value > band when no in-band path of cost <= band
    exists (the caller interprets that as "not exact").
    """
    if len(a) == 0 or len(b) == 0:
        return abs(len(a) - len(b))
    d = _dp_rows(a, b, band)
    return d if d <= band else band + 1


def mutate_apply(codes: np.ndarray, kinds: np.ndarray, u_pos: np.ndarray,
                 ins_bases: np.ndarray, sub_offsets: np.ndarray) -> tuple[np.ndarray, int]:
    """Apply pre-sampled point edits sequentially to a code array.

    Each edit addresses a uniform position in the *current* string
    (u_pos holds uniform [0,1) draws). Substitutions always change
    the base: new = (old + sub_offset) % 4 with sub_offset in 1..3.
    Deletions on an empty string are skipped and not counted.
    """
    buf = list(codes)
    applied = 0
    for e in range(len(kinds)):
        kind = kinds[e]
        cur = len(buf)
        if kind == DEL:
            if cur == 0:
                continue
            pos = int(u_pos[e] * cur)
            del buf[pos]
        elif kind == INS:
            pos = int(u_pos[e] * (cur + 1))
            buf.insert(pos, int(ins_bases[e]))
        else:
            if cur == 0:
                continue
            pos = int(u_pos[e] * cur)
            buf[pos] = (buf[pos] + int(sub_offsets[e])) % 4
        applied += 1
    return np.asarray(buf, dtype=np.uint8), applied


def accumulate_phasors(codes: np.ndarray, phases: np.ndarray, fold_dim: int) -> np.ndarray:
    """Sum unit phasors into per-factor buckets addressed by s-mer code.

    codes: int64 array of (folded) s-mer codes, one per location.
    phases: complex128 (m, len(codes)) table, phases[k, loc] is the
    phasor contributed by location loc under stretch factor k.
    """
    m = phases.shape[0]
    out = np.empty((m, fold_dim), dtype=np.complex128)
    for k in range(m):
        re = np.bincount(codes, weights=phases[k].real, minlength=fold_dim)
        im = np.bincount(codes, weights=phases[k].imag, minlength=fold_dim)
        out[k] = re + 1j * im
    return out
