"""Rotary-phase fingerprints of DNA sequences.

Every s-mer occurrence contributes a unit phasor whose angle encodes its
position; phasors are bucketed by s-mer code, per stretch factor, and the
bucket matrix (flattened) is normalized into a complex feature vector.
The squared inner product between two such vectors tracks the edit
distance between the underlying sequences.
"""
from __future__ import annotations

import heapq
import io
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .seqio import DnaSequence

DEGENERACY_SCALE = 1e-12  # threshold is this times the location count
_PROB_ONE = 1.0 - 1e-9
MAX_UNCERTAIN_EXPAND = 4   # full cartesian expansion up to 4^4 completions
MAX_COMPLETIONS = 256      # truncation for windows with more uncertainty

MAGIC = b"RDNA1"
_MODES = ("default", "fine_tuned")


@dataclass(frozen=True)
class RopeParams:
    """Fingerprint parameters: s-mer length, multiplicity m, optional fold
    target t (buckets become code mod 4^t), stretch mode and weighting."""

    s: int
    m: int
    t: int | None = None
    mode: str = "default"
    weighted: bool = False

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.t is not None and not 1 <= self.t <= self.s:
            raise ValueError("t must be in [1, s]")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.mode == "fine_tuned" and self.m < 2:
            raise ValueError("fine_tuned mode requires m >= 2")

    def factors(self) -> np.ndarray:
        """Stretch factors: k for default, 2(k-1)/(m-1)+1 for fine_tuned."""
        k = np.arange(1, self.m + 1, dtype=np.float64)
        if self.mode == "fine_tuned":
            return 2.0 * (k - 1.0) / (self.m - 1.0) + 1.0
        return k

    @property
    def fold_dim(self) -> int:
        return 4 ** (self.t if self.t is not None else self.s)

    @property
    def dim(self) -> int:
        return self.m * self.fold_dim


class RopeEncoding:
    """A normalized complex feature vector plus its generation metadata.

    `params` is None for concatenated encodings. A degenerate encoding
    (vanishing pre-normalization norm) carries a zero vector.
    """

    __slots__ = ("params", "amplitudes", "degenerate", "source_length")

    def __init__(self, params: RopeParams | None, amplitudes: np.ndarray,
                 degenerate: bool, source_length: int):
        self.params = params
        self.amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        self.amplitudes.setflags(write=False)
        self.degenerate = degenerate
        self.source_length = source_length

    @property
    def dim(self) -> int:
        return len(self.amplitudes)


def _as_sequence(seq) -> DnaSequence:
    return seq if isinstance(seq, DnaSequence) else DnaSequence.from_string(seq)


def smer_codes(codes: np.ndarray, s: int) -> np.ndarray:
    """Rolling s-mer codes (base-4, first letter most significant)."""
    n = len(codes) - s + 1
    out = np.zeros(n, dtype=np.int64)
    for j in range(s):
        out *= 4
        out += codes[j:j + n]
    return out


@lru_cache(maxsize=8)
def _phase_table(n_locs: int, length: int, factors: tuple[float, ...]) -> np.ndarray:
    """(m, n_locs) table of exp(2*pi*i * (f*loc mod N) / N).

    The exponent is reduced mod N before the angle is formed, which keeps
    precision for locations up to ~1e9.
    """
    locs = np.arange(n_locs, dtype=np.float64)
    table = np.empty((len(factors), n_locs), dtype=np.complex128)
    for k, f in enumerate(factors):
        r = np.mod(f * locs, float(length))
        table[k] = np.exp(2j * np.pi * r / float(length))
    table.setflags(write=False)
    return table


def raw_features(folded_codes: np.ndarray, params: RopeParams, length: int,
                 loc_mask: np.ndarray | None = None) -> np.ndarray:
    """Pre-normalization (m, fold_dim) bucket matrix for one window whose
    locations run 0..len(folded_codes)-1 relative to the window start."""
    phases = _phase_table(len(folded_codes), length, tuple(params.factors()))
    if loc_mask is not None:
        folded_codes = folded_codes[loc_mask]
        phases = np.ascontiguousarray(phases[:, loc_mask])
    return _kernels.accumulate_phasors(folded_codes, phases, params.fold_dim)


def _top_completions(options: list[list[tuple[int, float]]], limit: int):
    """Yield (codes, weight) over the product of per-position options in
    non-increasing weight order, at most `limit` of them.

    Options lists must be sorted by descending probability.
    """
    start = (0,) * len(options)
    w0 = 1.0
    for opts in options:
        w0 *= opts[0][1]
    heap = [(-w0, start)]
    seen = {start}
    emitted = 0
    while heap and emitted < limit:
        negw, idxs = heapq.heappop(heap)
        if -negw <= 0.0:
            break
        yield [options[j][idxs[j]][0] for j in range(len(options))], -negw
        emitted += 1
        for j in range(len(options)):
            if idxs[j] + 1 < len(options[j]):
                nxt = idxs[:j] + (idxs[j] + 1,) + idxs[j + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    w = -negw / options[j][idxs[j]][1] * options[j][idxs[j] + 1][1]
                    heapq.heappush(heap, (-w, nxt))


def _weighted_features(seq: DnaSequence, params: RopeParams) -> np.ndarray:
    """Bucket accumulation with per-window probability weights.

    Windows without uncertain positions go through the fast kernel path;
    windows with up to MAX_UNCERTAIN_EXPAND uncertain positions are fully
    expanded, denser windows are truncated to the MAX_COMPLETIONS most
    probable concrete completions.
    """
    s, n = params.s, len(seq)
    n_locs = n - s + 1
    probs = seq.probs
    uncertain = np.zeros(n, dtype=bool)
    if probs is not None:
        uncertain = probs.max(axis=1) < _PROB_ONE
    window_unc = np.convolve(uncertain.astype(np.int64), np.ones(s, dtype=np.int64),
                             mode="valid")
    folded = smer_codes(seq.codes, s)
    tb = params.t if params.t is not None else params.s
    folded &= (1 << (2 * tb)) - 1
    certain_mask = window_unc == 0
    raw = raw_features(folded, params, n, loc_mask=certain_mask)
    phases = _phase_table(n_locs, n, tuple(params.factors()))
    fold_mask = (1 << (2 * tb)) - 1
    for loc in np.nonzero(~certain_mask)[0]:
        options: list[list[tuple[int, float]]] = []
        for j in range(loc, loc + s):
            if uncertain[j]:
                opts = [(c, float(probs[j, c])) for c in range(4) if probs[j, c] > 0]
                opts.sort(key=lambda cp: (-cp[1], cp[0]))
            else:
                opts = [(int(seq.codes[j]), 1.0)]
            options.append(opts)
        if int(window_unc[loc]) <= MAX_UNCERTAIN_EXPAND:
            limit = 4 ** MAX_UNCERTAIN_EXPAND
        else:
            limit = MAX_COMPLETIONS
        for bases, weight in _top_completions(options, limit):
            code = 0
            for b in bases:
                code = code * 4 + b
            raw[:, code & fold_mask] += weight * phases[:, loc]
    return raw


def _finalize(raw: np.ndarray, params: RopeParams | None, n_locs: int,
              source_length: int) -> RopeEncoding:
    flat = raw.reshape(-1)
    norm = np.linalg.norm(flat)
    if norm < DEGENERACY_SCALE * max(n_locs, 1):
        return RopeEncoding(params, np.zeros_like(flat), True, source_length)
    return RopeEncoding(params, flat / norm, False, source_length)


def encode(seq, params: RopeParams) -> RopeEncoding:
    """Compute the fingerprint of `seq` under `params`."""
    seq = _as_sequence(seq)
    n = len(seq)
    if n < params.s:
        raise ValueError("sequence shorter than s")
    if params.weighted and seq.probs is not None:
        raw = _weighted_features(seq, params)
        return _finalize(raw, params, n - params.s + 1, n)
    folded = smer_codes(seq.codes, params.s)
    if params.t is not None:
        folded &= (1 << (2 * params.t)) - 1
    raw = raw_features(folded, params, n)
    return _finalize(raw, params, n - params.s + 1, n)


def encode_matrix_form(seq, params: RopeParams) -> RopeEncoding:
    """Independent construction: sum over locations of D^loc applied to the
    stretched one-hot of the s-mer, with D the diagonal of block phases.

    Supports the default, unweighted, unfolded variant only; serves as an
    equivalence oracle for `encode`.
    """
    if params.mode != "default" or params.weighted or params.t is not None:
        raise ValueError("matrix form supports the default unfolded variant only")
    seq = _as_sequence(seq)
    n = len(seq)
    if n < params.s:
        raise ValueError("sequence shorter than s")
    block = 4 ** params.s
    omega = np.exp(2j * np.pi / n)
    diag = np.concatenate([np.full(block, omega ** k)
                           for k in range(1, params.m + 1)])
    acc = np.zeros(params.m * block, dtype=np.complex128)
    codes = smer_codes(seq.codes, params.s)
    for loc, code in enumerate(codes):
        onehot_idx = np.arange(params.m) * block + code
        acc[onehot_idx] += diag[onehot_idx] ** loc
    return _finalize(acc.reshape(params.m, block), params, len(codes), n)


def fidelity(a: RopeEncoding, b: RopeEncoding) -> float:
    """|<a|b>|^2 between two unit encodings of equal dimension."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    if a.degenerate or b.degenerate:
        raise ValueError("fidelity of a degenerate encoding is undefined")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def fidelity_per_factor(a: RopeEncoding, b: RopeEncoding) -> float:
    """Average of per-factor fidelities between renormalized blocks; this
    comparison is approximately invariant under cyclic sequence shifts."""
    if a.params is None or b.params is None or a.params != b.params:
        raise ValueError("per-factor comparison needs matching parameters")
    m, fold = a.params.m, a.params.fold_dim
    blocks_a = a.amplitudes.reshape(m, fold)
    blocks_b = b.amplitudes.reshape(m, fold)
    total = 0.0
    for k in range(m):
        na, nb = np.linalg.norm(blocks_a[k]), np.linalg.norm(blocks_b[k])
        if na == 0.0 or nb == 0.0:
            raise ValueError(f"zero block at factor index {k}")
        total += abs(np.vdot(blocks_a[k] / na, blocks_b[k] / nb)) ** 2
    return total / m


def to_real(enc: RopeEncoding) -> np.ndarray:
    """Real parts then imaginary parts; unit norm is preserved."""
    if enc.degenerate:
        raise ValueError("cannot realify a degenerate encoding")
    return np.concatenate([enc.amplitudes.real, enc.amplitudes.imag])


def hamming_fingerprint_fidelity(s, t) -> float:
    """Fidelity of the positional Hamming fingerprint: ((n-d)/n)^2."""
    a, b = _as_sequence(s), _as_sequence(t)
    n = len(a)
    if n == 0 or n != len(b):
        raise ValueError("sequences must have equal nonzero length")
    d = int(np.count_nonzero(a.codes != b.codes))
    return ((n - d) / n) ** 2


def concat(*encodings: RopeEncoding) -> RopeEncoding:
    """Concatenate amplitude vectors and renormalize. The result carries
    no single parameter set and cannot be written to an encoding file."""
    if not encodings:
        raise ValueError("concat needs at least one encoding")
    if any(e.degenerate for e in encodings):
        raise ValueError("cannot concatenate degenerate encodings")
    if len(encodings) == 1:
        return encodings[0]
    flat = np.concatenate([e.amplitudes for e in encodings])
    return RopeEncoding(None, flat / np.linalg.norm(flat), False,
                        encodings[0].source_length)


# ---------------------------------------------------------------------------
# Encoding file: magic "RDNA1", params block, N, dim, interleaved f32 pairs.

_HEADER = struct.Struct("<HHhBBQI")


def save_encoding(enc: RopeEncoding, fp) -> None:
    if enc.params is None:
        raise ValueError("concatenated encodings have no single params block")
    close = False
    if isinstance(fp, (str, bytes)):
        fp, close = open(fp, "wb"), True
    try:
        p = enc.params
        fp.write(MAGIC)
        fp.write(_HEADER.pack(p.s, p.m, -1 if p.t is None else p.t,
                              _MODES.index(p.mode), int(p.weighted),
                              enc.source_length, enc.dim))
        inter = np.empty(2 * enc.dim, dtype=np.float32)
        inter[0::2] = enc.amplitudes.real
        inter[1::2] = enc.amplitudes.imag
        fp.write(inter.tobytes())
    finally:
        if close:
            fp.close()


def load_encoding(fp) -> RopeEncoding:
    close = False
    if isinstance(fp, (str, bytes)):
        fp, close = open(fp, "rb"), True
    try:
        if fp.read(len(MAGIC)) != MAGIC:
            raise ValueError("not an encoding file (bad magic)")
        s, m, t, mode, weighted, n, dim = _HEADER.unpack(fp.read(_HEADER.size))
        params = RopeParams(s, m, None if t < 0 else t, _MODES[mode],
                            bool(weighted))
        inter = np.frombuffer(fp.read(8 * dim), dtype=np.float32)
        if len(inter) != 2 * dim:
            raise ValueError("truncated encoding file")
        amps = inter[0::2].astype(np.float64) + 1j * inter[1::2].astype(np.float64)
        degenerate = not np.any(amps)
        return RopeEncoding(params, amps, degenerate, n)
    finally:
        if close:
            fp.close()
