import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ropedna import seqio
from ropedna.seqio import DnaSequence, FastaParseError, MutationSpec

dna_text = st.text(alphabet="ACGT", min_size=0, max_size=200)


def test_from_string_roundtrip():
    s = DnaSequence.from_string("ACGTACGT")
    assert str(s) == "ACGTACGT"
    assert len(s) == 8
    assert list(s.codes) == [0, 1, 2, 3, 0, 1, 2, 3]


def test_from_string_rejects_bad_letters():
    with pytest.raises(ValueError):
        DnaSequence.from_string("ACGX")


def test_codes_read_only():
    s = DnaSequence.from_string("ACGT")
    with pytest.raises(ValueError):
        s.codes[0] = 3


@given(dna_text)
@settings(max_examples=50, deadline=None)
def test_packed_roundtrip(text):
    s = DnaSequence.from_string(text)
    assert DnaSequence.from_packed(s.packed, len(s)) == s


def test_packed_layout():
    # low 2 bits hold the first base of each group of four
    s = DnaSequence.from_string("TGCA")  # 3,2,1,0
    assert s.packed == bytes([0b00011011])


def test_slice():
    s = DnaSequence.from_string("ACGTAC")
    assert str(s.slice(1, 4)) == "CGT"


@given(dna_text.filter(lambda t: len(t) > 0))
@settings(max_examples=50, deadline=None)
def test_reverse_complement_involution(text):
    s = DnaSequence.from_string(text)
    assert seqio.reverse_complement(seqio.reverse_complement(s)) == s


def test_reverse_complement_known():
    s = DnaSequence.from_string("AACGT")
    assert str(seqio.reverse_complement(s)) == "ACGTT"


def test_random_dna_deterministic():
    assert seqio.random_dna(100, 7) == seqio.random_dna(100, 7)
    assert seqio.random_dna(100, 7) != seqio.random_dna(100, 8)


def test_make_rng_is_counter_based():
    assert isinstance(seqio.make_rng(0).bit_generator, np.random.Philox)


# mutation model -----------------------------------------------------------

def test_mutate_rate_zero_identity():
    s = seqio.random_dna(500, 1)
    mut, applied = seqio.mutate(s, MutationSpec(rate=0.0, seed=2))
    assert mut == s and applied == 0


def test_mutate_deterministic():
    s = seqio.random_dna(2000, 3)
    spec = MutationSpec(rate=0.2, seed=9)
    assert seqio.mutate(s, spec)[0] == seqio.mutate(s, spec)[0]


def test_mutate_substitution_always_changes():
    s = seqio.random_dna(1000, 4)
    mut, applied = seqio.mutate(s, MutationSpec(rate=0.3, mix=(0, 0, 1), seed=5))
    assert applied == 300
    assert len(mut) == len(s)
    assert int(np.count_nonzero(mut.codes != s.codes)) > 0


def test_mutate_pure_insertions_grow():
    s = seqio.random_dna(100, 6)
    mut, applied = seqio.mutate(s, MutationSpec(rate=0.1, mix=(0, 1, 0), seed=7))
    assert len(mut) == 110 and applied == 10


def test_mutate_pure_deletions_shrink():
    s = seqio.random_dna(100, 6)
    mut, applied = seqio.mutate(s, MutationSpec(rate=0.1, mix=(1, 0, 0), seed=7))
    assert len(mut) == 90 and applied == 10


def test_mutate_shift_drops_head():
    s = seqio.random_dna(50, 8)
    mut, _ = seqio.mutate(s, MutationSpec(rate=0.0, shift=10, seed=1))
    assert len(mut) == 50
    assert str(mut)[:40] == str(s)[10:]


def test_mutate_shift_too_large():
    s = seqio.random_dna(5, 0)
    with pytest.raises(ValueError):
        seqio.mutate(s, MutationSpec(rate=0.0, shift=6, seed=0))


def test_mutation_spec_validation():
    with pytest.raises(ValueError):
        MutationSpec(rate=1.0)
    with pytest.raises(ValueError):
        MutationSpec(rate=0.1, mix=(0.5, 0.5, 0.5))


# FASTA / FASTQ -------------------------------------------------------------

def test_parse_fasta_basic():
    recs = seqio.parse_fasta(b">r1 desc\nACGT\nACGT\n>r2\nTTTT\n")
    assert [(i, str(s)) for i, s in recs] == [("r1", "ACGTACGT"), ("r2", "TTTT")]


def test_parse_fasta_strict_rejects_iupac():
    with pytest.raises(FastaParseError) as ei:
        seqio.parse_fasta(b">r\nACNG\n", iupac="strict")
    assert ei.value.offset == 5  # byte offset of the N


def test_parse_fasta_randomize_iupac():
    recs = seqio.parse_fasta(b">r\nANNA\n", iupac="randomize", seed=0)
    s = recs[0][1]
    assert len(s) == 4 and s.codes[0] == 0 and s.codes[3] == 0


def test_parse_fasta_probabilistic_iupac():
    recs = seqio.parse_fasta(b">r\nAR\n", iupac="probabilistic")
    probs = recs[0][1].probs
    assert probs is not None
    np.testing.assert_allclose(probs[0], [1, 0, 0, 0])
    np.testing.assert_allclose(probs[1], [0.5, 0, 0.5, 0])  # R = A/G


def test_parse_fasta_error_offsets():
    with pytest.raises(FastaParseError) as ei:
        seqio.parse_fasta(b"ACGT\n")
    assert ei.value.offset == 0


def test_fasta_roundtrip():
    recs = [("a", seqio.random_dna(150, 1)), ("b", seqio.random_dna(7, 2))]
    out = seqio.serialize_fasta(recs)
    back = seqio.parse_fasta(out)
    assert back == recs
    # 60-column wrapping
    assert max(len(line) for line in out.split(b"\n") if line) <= 60


def test_parse_fastq():
    data = b"@r1\nACGT\n+\nIIII\n"
    recs = seqio.parse_fastq(data)
    (rid, s), = recs
    assert rid == "r1" and str(s) == "ACGT"
    # Q=40 -> P(correct) = 1 - 1e-4
    np.testing.assert_allclose(s.probs[0, 0], 1 - 1e-4)
    np.testing.assert_allclose(s.probs[0, 1], 1e-4 / 3)


def test_parse_fastq_bad_record():
    with pytest.raises(ValueError):
        seqio.parse_fastq(b"@r1\nACGT\n+\nIII\n")  # quality length mismatch
