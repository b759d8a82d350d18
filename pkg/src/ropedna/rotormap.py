"""Reference index construction, batched fidelity search, and constant-cost
sliding refinement of mapped locations."""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import rope, seqio
from .rope import RopeEncoding, RopeParams
from .seqio import DnaSequence

MAGIC = b"RMIX1"
_MODES = ("default", "fine_tuned")


@dataclass
class FragmentIndex:
    """Row-normalized fragment encodings over a reference, plus metadata.

    Rows are complex64; degenerate fragments carry a zero row and are
    flagged. `thresholds` (per-fragment minimum fidelity) is optional.
    """

    ref_id: str
    window: int
    step: int
    params: RopeParams
    offsets: np.ndarray
    encodings: np.ndarray
    degenerate: np.ndarray
    thresholds: np.ndarray | None = None

    @property
    def fragment_count(self) -> int:
        return len(self.offsets)


@dataclass(frozen=True)
class MappingResult:
    read_id: str
    strand: str  # "+" or "-"
    locations: list[tuple[int, float]]  # (offset, fidelity), fidelity desc
    regime: str  # "top1" or "threshold"


def build_index(ref: DnaSequence, window: int, step: int, params: RopeParams,
                ref_id: str = "ref") -> FragmentIndex:
    """Encode reference windows at offsets 0, step, 2*step, ..."""
    r = len(ref)
    if r < window:
        raise ValueError("reference shorter than the window size")
    if step < 1:
        raise ValueError("step must be >= 1")
    folded = rope.smer_codes(ref.codes, params.s)
    if params.t is not None:
        folded = folded & ((1 << (2 * params.t)) - 1)
    offsets = np.arange(0, r - window + 1, step, dtype=np.int64)
    n_locs = window - params.s + 1
    enc = np.zeros((len(offsets), params.dim), dtype=np.complex64)
    degenerate = np.zeros(len(offsets), dtype=bool)
    for i, off in enumerate(offsets):
        raw = rope.raw_features(folded[off:off + n_locs], params, window)
        flat = raw.reshape(-1)
        norm = np.linalg.norm(flat)
        if norm < rope.DEGENERACY_SCALE * n_locs:
            degenerate[i] = True
        else:
            enc[i] = (flat / norm).astype(np.complex64)
    return FragmentIndex(ref_id, window, step, params, offsets, enc, degenerate)


def _query_encodings(index: FragmentIndex, reads, both_strands: bool):
    """Encode read heads (and reverse-complement heads); returns per-read
    per-strand encodings with a degeneracy marker."""
    out = []
    for read_id, read in reads:
        if len(read) < index.window:
            raise ValueError(f"read {read_id!r} shorter than the index window")
        strands = [("+", read.slice(0, index.window))]
        if both_strands:
            rc = seqio.reverse_complement(read)
            strands.append(("-", rc.slice(0, index.window)))
        per_read = []
        for strand, head in strands:
            e = rope.encode(head, index.params)
            per_read.append((strand, e))
        out.append((read_id, per_read))
    return out


def _score_matrix(index: FragmentIndex, encodings: list[RopeEncoding]) -> np.ndarray:
    """Fidelities |<q|row>|^2 for a batch of queries: one BLAS matmul."""
    if not encodings:
        return np.zeros((0, index.fragment_count), dtype=np.float32)
    q = np.stack([e.amplitudes.astype(np.complex64) for e in encodings])
    s = np.conj(q) @ index.encodings.T
    fid = (s.real.astype(np.float64) ** 2 + s.imag.astype(np.float64) ** 2)
    fid[:, index.degenerate] = -1.0
    return fid


def search_top1(index: FragmentIndex, reads, both_strands: bool = True) -> list[MappingResult]:
    """Full scan; returns the argmax fragment per read. Ties break toward
    the smaller offset, then the + strand."""
    queries = _query_encodings(index, reads, both_strands)
    flat = [e for _, per_read in queries for _, e in per_read]
    live = [e for e in flat if not e.degenerate]
    scores = _score_matrix(index, live)
    results = []
    row = 0
    for read_id, per_read in queries:
        best = None  # (fid, offset, strand_order)
        for strand, e in per_read:
            if e.degenerate:
                continue
            fid_row = scores[row]
            row += 1
            j = int(np.argmax(fid_row))  # first max -> smallest offset
            fid = float(fid_row[j])
            if fid < 0:
                continue
            cand = (-fid, int(index.offsets[j]), 0 if strand == "+" else 1, strand)
            if best is None or cand < best:
                best = cand
        if best is None:
            results.append(MappingResult(read_id, "+", [], "top1"))
        else:
            results.append(MappingResult(read_id, best[3],
                                         [(best[1], -best[0])], "top1"))
    return results


def search_threshold(index: FragmentIndex, reads, both_strands: bool = True) -> list[MappingResult]:
    """All fragments whose fidelity clears their per-fragment threshold.
    Reports the strand holding the best match."""
    if index.thresholds is None:
        raise ValueError("index has no thresholds; run estimate_thresholds first")
    queries = _query_encodings(index, reads, both_strands)
    live = [e for _, per_read in queries for _, e in per_read if not e.degenerate]
    scores = _score_matrix(index, live)
    results = []
    row = 0
    for read_id, per_read in queries:
        per_strand = {}
        for strand, e in per_read:
            if e.degenerate:
                raise ValueError(f"read {read_id!r} has a degenerate encoding")
            fid_row = scores[row]
            row += 1
            hit = np.nonzero(fid_row >= index.thresholds)[0]
            locs = sorted(((int(index.offsets[j]), float(fid_row[j])) for j in hit),
                          key=lambda of: (-of[1], of[0]))
            per_strand[strand] = locs
        strand = "+"
        if ("-" in per_strand and per_strand["-"]
                and (not per_strand["+"]
                     or per_strand["-"][0][1] > per_strand["+"][0][1])):
            strand = "-"
        results.append(MappingResult(read_id, strand, per_strand[strand], "threshold"))
    return results


# ---------------------------------------------------------------------------
# incremental sliding refinement

@dataclass
class SlideState:
    """Window state for 1-bp sliding with O(m) per-step fidelity updates.

    True bucket values are g[k] * c_lazy[k]; the global rotation per step
    is folded into g (lazy bookkeeping) so only the departing/arriving
    buckets are touched.
    """

    start: int
    window: int
    params: RopeParams
    folded: np.ndarray          # folded s-mer codes of the whole reference
    c_lazy: np.ndarray          # (m, fold_dim) complex128
    g: np.ndarray               # (m,) lazy global phases
    ip: np.ndarray              # (m,) inner products vs the query
    c_sq: np.ndarray            # (m,) squared norms of the window features
    x: np.ndarray               # (m, fold_dim) query feature blocks
    x_sq: float                 # squared norm of the query as supplied
    alpha: np.ndarray           # (m,) per-factor omega^-1
    beta: np.ndarray            # (m,) per-factor omega^(N-s)
    freeze_norm: bool = False
    steps: int = field(default=0)

    @property
    def degenerate(self) -> bool:
        n_locs = self.window - self.params.s + 1
        return float(self.c_sq.sum()) < (rope.DEGENERACY_SCALE * n_locs) ** 2

    def fidelity(self) -> float:
        if self.degenerate:
            raise ValueError("window encoding is degenerate")
        ip_total = complex(self.ip.sum())
        return float(abs(ip_total) ** 2 / (self.x_sq * float(self.c_sq.sum())))


def init_slide(ref: DnaSequence, start: int, window: int, params: RopeParams,
               query_encoding: RopeEncoding,
               freeze_norm: bool = False) -> SlideState:
    """State whose materialized fidelity equals a full recomputation of
    fidelity(encode(window), query)."""
    if start < 0 or start + window > len(ref):
        raise ValueError("window out of range")
    if query_encoding.dim != params.dim:
        raise ValueError("query dimension does not match params")
    folded = rope.smer_codes(ref.codes, params.s)
    if params.t is not None:
        folded = folded & ((1 << (2 * params.t)) - 1)
    n_locs = window - params.s + 1
    raw = rope.raw_features(folded[start:start + n_locs], params, window)
    x = query_encoding.amplitudes.reshape(params.m, params.fold_dim)
    factors = params.factors()
    omega = np.exp(2j * np.pi * factors / window)
    ip = np.einsum("kf,kf->k", np.conj(x), raw)
    return SlideState(
        start=start, window=window, params=params, folded=folded,
        c_lazy=raw.copy(), g=np.ones(params.m, dtype=np.complex128),
        ip=ip.astype(np.complex128),
        c_sq=np.einsum("kf,kf->k", np.conj(raw), raw).real,
        x=x, x_sq=float(np.vdot(x, x).real),
        alpha=omega ** -1.0,
        beta=np.exp(2j * np.pi * factors * (window - params.s) / window),
        freeze_norm=freeze_norm,
    )


def slide_update(state: SlideState, ref: DnaSequence | None = None) -> SlideState:
    """Advance the window by 1 bp; O(m) work, independent of the window
    length and the bucket count."""
    s = state.params.s
    arriving_idx = state.start + state.window - s + 1
    if arriving_idx >= len(state.folded):
        raise ValueError("window end is at the reference end")
    o_code = int(state.folded[state.start])
    a_code = int(state.folded[arriving_idx])
    for k in range(state.params.m):
        alpha, beta = state.alpha[k], state.beta[k]
        g_new = state.g[k] * alpha
        if not state.freeze_norm:
            if o_code == a_code:
                delta = -alpha + beta
                v = g_new * state.c_lazy[k, o_code]
                state.c_sq[k] += 2.0 * (np.conj(v) * delta).real + abs(delta) ** 2
            else:
                vo = g_new * state.c_lazy[k, o_code]
                va = g_new * state.c_lazy[k, a_code]
                state.c_sq[k] += (2.0 * (np.conj(vo) * -alpha).real + 1.0
                                  + 2.0 * (np.conj(va) * beta).real + 1.0)
        state.c_lazy[k, o_code] += -alpha / g_new
        state.c_lazy[k, a_code] += beta / g_new
        state.g[k] = g_new
        state.ip[k] = (state.ip[k] * alpha
                       - np.conj(state.x[k, o_code]) * alpha
                       + np.conj(state.x[k, a_code]) * beta)
    state.start += 1
    state.steps += 1
    if state.steps % 512 == 0:
        # keep the lazy phases on the unit circle
        state.g /= np.abs(state.g)
    return state


def refine(ref: DnaSequence, query_encoding: RopeEncoding, approx_offset: int,
           radius: int, fine_step: int = 1,
           freeze_norm: bool = False) -> tuple[int, float]:
    """Slide over [approx-radius, approx+radius] and return the fidelity
    argmax (ties toward the smaller offset). The range is clipped to the
    reference bounds."""
    params = query_encoding.params
    if params is None:
        raise ValueError("query encoding has no parameters")
    window = query_encoding.source_length
    lo = max(0, approx_offset - radius)
    hi = min(approx_offset + radius, len(ref) - window)
    if lo > hi:
        raise ValueError("refinement range is empty after clipping")
    state = init_slide(ref, lo, window, params, query_encoding,
                       freeze_norm=freeze_norm)
    best_off, best_fid = lo, -1.0
    pos = lo
    while True:
        if (pos - lo) % fine_step == 0 and not state.degenerate:
            fid = state.fidelity()
            if fid > best_fid:
                best_off, best_fid = pos, fid
        if pos >= hi:
            break
        slide_update(state)
        pos += 1
    return best_off, best_fid


# ---------------------------------------------------------------------------
# index file: magic "RMIX1", header, offsets (u64), rows (f32 pairs),
# optional thresholds (f32)

_HEADER = struct.Struct("<QQHHhBBQB")


def save_index(index: FragmentIndex, fp) -> None:
    close = False
    if isinstance(fp, (str, bytes)):
        fp, close = open(fp, "wb"), True
    try:
        p = index.params
        rid = index.ref_id.encode("utf-8")
        fp.write(MAGIC)
        fp.write(struct.pack("<H", len(rid)))
        fp.write(rid)
        fp.write(_HEADER.pack(index.window, index.step, p.s, p.m,
                              -1 if p.t is None else p.t,
                              _MODES.index(p.mode), int(p.weighted),
                              index.fragment_count,
                              int(index.thresholds is not None)))
        fp.write(index.offsets.astype("<u8").tobytes())
        inter = np.empty((index.fragment_count, 2 * p.dim), dtype="<f4")
        inter[:, 0::2] = index.encodings.real
        inter[:, 1::2] = index.encodings.imag
        fp.write(inter.tobytes())
        if index.thresholds is not None:
            fp.write(index.thresholds.astype("<f4").tobytes())
    finally:
        if close:
            fp.close()


def load_index(fp) -> FragmentIndex:
    close = False
    if isinstance(fp, (str, bytes)):
        fp, close = open(fp, "rb"), True
    try:
        if fp.read(len(MAGIC)) != MAGIC:
            raise ValueError("not an index file (bad magic)")
        (rid_len,) = struct.unpack("<H", fp.read(2))
        ref_id = fp.read(rid_len).decode("utf-8")
        window, step, s, m, t, mode, weighted, count, has_thr = _HEADER.unpack(
            fp.read(_HEADER.size))
        params = RopeParams(s, m, None if t < 0 else t, _MODES[mode],
                            bool(weighted))
        offsets = np.frombuffer(fp.read(8 * count), dtype="<u8").astype(np.int64)
        inter = np.frombuffer(fp.read(count * params.dim * 8), dtype="<f4")
        inter = inter.reshape(count, 2 * params.dim)
        enc = (inter[:, 0::2] + 1j * inter[:, 1::2]).astype(np.complex64)
        degenerate = ~np.any(enc, axis=1)
        thresholds = None
        if has_thr:
            thresholds = np.frombuffer(fp.read(4 * count), dtype="<f4").astype(np.float64)
        return FragmentIndex(ref_id, window, step, params, offsets, enc,
                             degenerate, thresholds)
    finally:
        if close:
            fp.close()
