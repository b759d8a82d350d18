"""DNA sequences: representation, FASTA/FASTQ-lite I/O, random generation
and mutation simulation.

All randomness flows through numpy's Philox generator (a 64-bit
counter-based RNG), so every sampled artifact is reproducible
bit-for-bit from its seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

BASES = "ACGT"
_CODE = {c: i for i, c in enumerate(BASES)}

# IUPAC ambiguity codes -> candidate base codes
IUPAC = {
    "A": (0,), "C": (1,), "G": (2,), "T": (3,),
    "R": (0, 2), "Y": (1, 3), "S": (1, 2), "W": (0, 3),
    "K": (2, 3), "M": (0, 1),
    "B": (1, 2, 3), "D": (0, 2, 3), "H": (0, 1, 3), "V": (0, 1, 2),
    "N": (0, 1, 2, 3),
}

PROB_TOL = 1e-9


class FastaParseError(ValueError):
    """Malformed FASTA/FASTQ input; carries the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def make_rng(seed: int) -> np.random.Generator:
    """The project-wide RNG: Philox, counter-based, 64-bit seeded."""
    return np.random.Generator(np.random.Philox(seed))


class DnaSequence:
    """Immutable DNA string over {A,C,G,T} as 2-bit codes (A=0,C=1,G=2,T=3).

    `probs`, when present, holds one distribution over the four bases per
    position (rows sum to 1 within 1e-9); the code array then stores a
    concrete representative base per position.
    """

    __slots__ = ("_codes", "_probs")

    def __init__(self, codes: np.ndarray, probs: np.ndarray | None = None):
        codes = np.ascontiguousarray(codes, dtype=np.uint8)
        if codes.ndim != 1:
            raise ValueError("codes must be one-dimensional")
        if codes.size and codes.max() > 3:
            raise ValueError("codes must be in 0..3")
        if probs is not None:
            probs = np.ascontiguousarray(probs, dtype=np.float64)
            if probs.shape != (len(codes), 4):
                raise ValueError("probs must have shape (length, 4)")
            if not np.allclose(probs.sum(axis=1), 1.0, atol=PROB_TOL, rtol=0):
                raise ValueError("probs rows must sum to 1")
            probs.setflags(write=False)
        codes.setflags(write=False)
        self._codes = codes
        self._probs = probs

    @classmethod
    def from_string(cls, text: str) -> "DnaSequence":
        arr = np.frombuffer(text.upper().encode("ascii"), dtype=np.uint8)
        codes = np.full(arr.shape, 255, dtype=np.uint8)
        for ch, code in _CODE.items():
            codes[arr == ord(ch)] = code
        if codes.size and codes.max() > 3:
            bad = int(np.argmax(codes > 3))
            raise ValueError(f"non-ACGT symbol {text[bad]!r} at position {bad}")
        return cls(codes)

    @property
    def codes(self) -> np.ndarray:
        return self._codes

    @property
    def probs(self) -> np.ndarray | None:
        return self._probs

    def __len__(self) -> int:
        return len(self._codes)

    def __str__(self) -> str:
        lut = np.frombuffer(BASES.encode(), dtype=np.uint8)
        return lut[self._codes].tobytes().decode("ascii")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DnaSequence):
            return NotImplemented
        return np.array_equal(self._codes, other._codes)

    def __hash__(self):
        return hash(self._codes.tobytes())

    def slice(self, start: int, stop: int) -> "DnaSequence":
        probs = None if self._probs is None else self._probs[start:stop]
        return DnaSequence(self._codes[start:stop], probs)

    @property
    def packed(self) -> bytes:
        """2-bit packed storage, 4 bases per byte, low bits first."""
        n = len(self._codes)
        padded = np.zeros((n + 3) // 4 * 4, dtype=np.uint8)
        padded[:n] = self._codes
        quads = padded.reshape(-1, 4)
        byts = quads[:, 0] | (quads[:, 1] << 2) | (quads[:, 2] << 4) | (quads[:, 3] << 6)
        return byts.astype(np.uint8).tobytes()

    @classmethod
    def from_packed(cls, data: bytes, length: int) -> "DnaSequence":
        byts = np.frombuffer(data, dtype=np.uint8)
        codes = np.empty(len(byts) * 4, dtype=np.uint8)
        for i in range(4):
            codes[i::4] = (byts >> (2 * i)) & 3
        return cls(codes[:length])


@dataclass(frozen=True)
class MutationSpec:
    """Mutation model: head-cut `shift` first, then floor(rate*length)
    point edits of types drawn from `mix` = (p_del, p_ins, p_sub)."""

    rate: float
    mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    shift: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ValueError("rate must be in [0, 1)")
        if min(self.mix) < 0 or abs(sum(self.mix) - 1.0) > PROB_TOL:
            raise ValueError("mix must be nonnegative and sum to 1")
        if self.shift < 0:
            raise ValueError("shift must be >= 0")


def random_dna(length: int, seed: int) -> DnaSequence:
    """Uniform i.i.d. bases; deterministic for a fixed seed."""
    if length < 0:
        raise ValueError("length must be >= 0")
    rng = make_rng(seed)
    return DnaSequence(rng.integers(0, 4, size=length, dtype=np.uint8))


def mutate(seq: DnaSequence, spec: MutationSpec) -> tuple[DnaSequence, int]:
    """Apply `spec` to `seq`; returns the mutant and the number of point
    edits actually applied (skipped deletions are not counted).

    Edit positions are sampled uniformly over the current, evolving
    string after each edit. The output is a concrete sequence (no probs).
    """
    if len(seq) == 0:
        raise ValueError("cannot mutate an empty sequence")
    if spec.shift > len(seq):
        raise ValueError("shift exceeds sequence length")
    rng = make_rng(spec.seed)
    codes = seq.codes
    if spec.shift:
        tail = rng.integers(0, 4, size=spec.shift, dtype=np.uint8)
        codes = np.concatenate([codes[spec.shift:], tail])
    n_edits = int(spec.rate * len(codes))
    if n_edits == 0:
        return DnaSequence(codes), 0
    p_del, p_ins, _ = spec.mix
    u = rng.random(n_edits)
    kinds = np.full(n_edits, 2, dtype=np.uint8)  # SUB
    kinds[u < p_del + p_ins] = 1                 # INS
    kinds[u < p_del] = 0                         # DEL
    u_pos = rng.random(n_edits)
    ins_bases = rng.integers(0, 4, size=n_edits, dtype=np.uint8)
    sub_offsets = rng.integers(1, 4, size=n_edits, dtype=np.uint8)
    out, applied = _kernels.mutate_apply(codes, kinds, u_pos, ins_bases, sub_offsets)
    return DnaSequence(out), applied


def reverse_complement(seq: DnaSequence) -> DnaSequence:
    """A<->T, C<->G, order reversed. Involution; probs rows follow."""
    codes = (3 - seq.codes)[::-1]
    probs = None
    if seq.probs is not None:
        probs = seq.probs[::-1, ::-1]
    return DnaSequence(codes, probs)


def _expand_iupac(letters: np.ndarray, offsets: np.ndarray, mode: str,
                  seed: int) -> tuple[np.ndarray, np.ndarray | None]:
    codes = np.empty(len(letters), dtype=np.uint8)
    probs = None
    ambiguous = []
    for i, ch in enumerate(letters):
        c = chr(ch)
        options = IUPAC.get(c)
        if options is None:
            raise FastaParseError(f"symbol {c!r} not in IUPAC alphabet",
                                  int(offsets[i]))
        if len(options) == 1:
            codes[i] = options[0]
        else:
            if mode == "strict":
                raise FastaParseError(f"ambiguous symbol {c!r} in strict mode",
                                      int(offsets[i]))
            ambiguous.append((i, options))
            codes[i] = options[0]
    if ambiguous:
        if mode == "probabilistic":
            probs = np.zeros((len(letters), 4))
            probs[np.arange(len(letters)), codes] = 1.0
            for i, options in ambiguous:
                probs[i] = 0.0
                probs[i, list(options)] = 1.0 / len(options)
        elif mode == "randomize":
            rng = make_rng(seed)
            for i, options in ambiguous:
                codes[i] = options[rng.integers(0, len(options))]
        else:
            raise ValueError(f"unknown IUPAC mode {mode!r}")
    return codes, probs


def parse_fasta(data: bytes, iupac: str = "strict",
                seed: int = 0) -> list[tuple[str, DnaSequence]]:
    """Parse ASCII FASTA. `iupac` selects handling of ambiguity codes:
    'strict' rejects them, 'probabilistic' expands them into probs rows,
    'randomize' samples a concrete base (seeded)."""
    records: list[tuple[str, DnaSequence]] = []
    name: str | None = None
    letters: list[np.ndarray] = []
    offsets: list[np.ndarray] = []
    pos = 0

    def flush(at: int):
        if name is None:
            return
        if not name:
            raise FastaParseError("empty record name", at)
        seq_bytes = (np.concatenate(letters) if letters
                     else np.empty(0, dtype=np.uint8))
        offs = (np.concatenate(offsets) if offsets
                else np.empty(0, dtype=np.int64))
        codes, probs = _expand_iupac(seq_bytes, offs, iupac, seed)
        records.append((name, DnaSequence(codes, probs)))

    for raw in data.split(b"\n"):
        line = raw.strip()
        if line.startswith(b">"):
            flush(pos)
            # the record id is the first whitespace-delimited header token
            header = line[1:].strip().decode("ascii")
            name = header.split()[0] if header else ""
            letters, offsets = [], []
        elif line:
            if name is None:
                raise FastaParseError("sequence data before first header", pos)
            arr = np.frombuffer(line.upper(), dtype=np.uint8)
            letters.append(arr)
            start = pos + raw.find(line[:1])
            offsets.append(start + np.arange(len(arr), dtype=np.int64))
        pos += len(raw) + 1
    flush(pos)
    return records


def serialize_fasta(records: list[tuple[str, DnaSequence]], width: int = 60) -> bytes:
    out = []
    for name, seq in records:
        out.append(f">{name}")
        text = str(seq)
        for i in range(0, max(len(text), 1), width):
            chunk = text[i:i + width]
            if chunk or len(text) == 0:
                out.append(chunk)
    return ("\n".join(out) + "\n").encode("ascii")


def parse_fastq(data: bytes) -> list[tuple[str, DnaSequence]]:
    """FASTQ-lite: 4-line records, Phred+33 qualities converted to probs
    rows with P(correct) = 1 - 10^(-Q/10) and the residual error mass
    split equally among the other three bases."""
    lines = [ln for ln in data.split(b"\n")]
    # drop a single trailing empty line
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) % 4 != 0:
        raise FastaParseError("FASTQ record is not a multiple of 4 lines",
                              len(data))
    records = []
    offset = 0
    for i in range(0, len(lines), 4):
        head, seq_line, plus, qual = (lines[i + j].strip() for j in range(4))
        if not head.startswith(b"@") or not plus.startswith(b"+"):
            raise FastaParseError("malformed FASTQ record", offset)
        name = head[1:].decode("ascii")
        if not name:
            raise FastaParseError("empty record name", offset)
        if len(seq_line) != len(qual):
            raise FastaParseError("quality length mismatch", offset)
        codes, _ = _expand_iupac(np.frombuffer(seq_line.upper(), dtype=np.uint8),
                                 offset + np.arange(len(seq_line)), "strict", 0)
        q = np.frombuffer(qual, dtype=np.uint8).astype(np.float64) - 33.0
        if q.size and q.min() < 0:
            raise FastaParseError("quality character below Phred+33", offset)
        p_ok = 1.0 - np.power(10.0, -q / 10.0)
        probs = np.full((len(codes), 4), 0.0)
        probs[:] = ((1.0 - p_ok) / 3.0)[:, None]
        probs[np.arange(len(codes)), codes] = p_ok
        records.append((name, DnaSequence(codes, probs)))
        offset += sum(len(lines[i + j]) + 1 for j in range(4))
    return records
