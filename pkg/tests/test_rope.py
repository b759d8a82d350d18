import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ropedna import rope, seqio
from ropedna.rope import RopeParams

from .conftest import naive_encode, naive_unit

dna = st.text(alphabet="ACGT", min_size=8, max_size=80)


def test_params_validation():
    with pytest.raises(ValueError):
        RopeParams(0, 1)
    with pytest.raises(ValueError):
        RopeParams(2, 0)
    with pytest.raises(ValueError):
        RopeParams(2, 2, t=3)
    with pytest.raises(ValueError):
        RopeParams(2, 2, mode="other")
    with pytest.raises(ValueError):
        RopeParams(2, 1, mode="fine_tuned")


def test_factors():
    np.testing.assert_allclose(RopeParams(1, 4).factors(), [1, 2, 3, 4])
    np.testing.assert_allclose(RopeParams(1, 4, mode="fine_tuned").factors(),
                               [1, 5 / 3, 7 / 3, 3])
    np.testing.assert_allclose(RopeParams(1, 2, mode="fine_tuned").factors(),
                               [1, 3])


def test_dims():
    p = RopeParams(5, 4)
    assert p.fold_dim == 4 ** 5 and p.dim == 4096
    p = RopeParams(8, 4, t=4)
    assert p.fold_dim == 256 and p.dim == 1024


def test_smer_codes_first_letter_most_significant():
    codes = seqio.DnaSequence.from_string("ACGT").codes
    # "ACG" -> 0*16 + 1*4 + 2, "CGT" -> 1*16 + 2*4 + 3
    assert list(rope.smer_codes(codes, 3)) == [6, 27]


@given(dna, st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_encode_matches_naive(text, s, m):
    enc = rope.encode(text, RopeParams(s, m))
    if enc.degenerate:
        flat = naive_encode(text, s, m).reshape(-1)
        assert np.linalg.norm(flat) < 1e-9
        return
    np.testing.assert_allclose(enc.amplitudes, naive_unit(text, s, m),
                               atol=1e-12)


@given(dna, st.integers(1, 3), st.integers(2, 3))
@settings(max_examples=40, deadline=None)
def test_encode_fine_tuned_matches_naive(text, s, m):
    enc = rope.encode(text, RopeParams(s, m, mode="fine_tuned"))
    if enc.degenerate:
        flat = naive_encode(text, s, m, mode="fine_tuned").reshape(-1)
        assert np.linalg.norm(flat) < 1e-9
        return
    np.testing.assert_allclose(
        enc.amplitudes, naive_unit(text, s, m, mode="fine_tuned"), atol=1e-12)


@given(dna, st.integers(2, 3), st.integers(1, 2), st.integers(1, 2))
@settings(max_examples=40, deadline=None)
def test_fold_matches_naive(text, s, m, t):
    enc = rope.encode(text, RopeParams(s, m, t=t))
    if not enc.degenerate:
        np.testing.assert_allclose(enc.amplitudes, naive_unit(text, s, m, t=t),
                                   atol=1e-12)


def test_fold_keeps_last_letters():
    # folding s=2 -> t=1 buckets by the trailing letter
    a = rope.encode("ACGTAC", RopeParams(2, 1, t=1))
    raw = naive_encode("ACGTAC", 2, 1)
    folded = raw.reshape(4, 4).sum(axis=0)  # code = 4*first + last
    np.testing.assert_allclose(a.amplitudes,
                               folded / np.linalg.norm(folded), atol=1e-12)


def test_matrix_form_oracle_fuzz(rng):
    from .conftest import random_string
    for _ in range(100):
        s = int(rng.integers(1, 4))
        m = int(rng.integers(1, 3))
        n = int(rng.integers(s + 1, 201))
        text = random_string(rng, n)
        p = RopeParams(s, m)
        a, b = rope.encode(text, p), rope.encode_matrix_form(text, p)
        assert a.degenerate == b.degenerate
        if not a.degenerate:
            np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-9)


def test_matrix_form_rejects_variants():
    with pytest.raises(ValueError):
        rope.encode_matrix_form("ACGT", RopeParams(2, 2, mode="fine_tuned"))
    with pytest.raises(ValueError):
        rope.encode_matrix_form("ACGT", RopeParams(2, 2, t=1))


def test_degeneracy_all_a_default_vs_fine_tuned():
    homo = "A" * 64
    assert rope.encode(homo, RopeParams(1, 4)).degenerate
    enc = rope.encode(homo, RopeParams(1, 4, mode="fine_tuned"))
    assert not enc.degenerate


def test_encoding_is_unit_norm(rng):
    enc = rope.encode(seqio.random_dna(300, 1), RopeParams(4, 3))
    np.testing.assert_allclose(np.linalg.norm(enc.amplitudes), 1.0, atol=1e-12)


def test_fidelity_bounds_and_self():
    a = rope.encode(seqio.random_dna(200, 1), RopeParams(3, 2))
    b = rope.encode(seqio.random_dna(200, 2), RopeParams(3, 2))
    assert rope.fidelity(a, a) == pytest.approx(1.0)
    assert 0.0 <= rope.fidelity(a, b) <= 1.0
    assert rope.fidelity(a, b) == pytest.approx(rope.fidelity(b, a))


def test_fidelity_tracks_rate():
    seq = seqio.random_dna(2000, 3)
    p = RopeParams(5, 4)
    base = rope.encode(seq, p)
    fids = []
    for rate in (0.02, 0.1, 0.3):
        mut, _ = seqio.mutate(seq, seqio.MutationSpec(rate=rate, seed=4))
        fids.append(rope.fidelity(base, rope.encode(mut, p)))
    assert fids[0] > fids[1] > fids[2]


def test_fidelity_errors():
    a = rope.encode("ACGTACGT", RopeParams(2, 1))
    b = rope.encode("ACGTACGT", RopeParams(2, 2))
    with pytest.raises(ValueError):
        rope.fidelity(a, b)
    d = rope.encode("A" * 32, RopeParams(1, 1))
    assert d.degenerate
    with pytest.raises(ValueError):
        rope.fidelity(d, d)


def test_per_factor_shift_invariance():
    seq = seqio.random_dna(4000, 5)
    p = RopeParams(4, 4)
    a = rope.encode(seq, p)
    shifted, _ = seqio.mutate(seq, seqio.MutationSpec(rate=0.0, shift=200, seed=6))
    b = rope.encode(shifted, p)
    # the plain fidelity collapses under a shift; per-factor stays high
    assert rope.fidelity_per_factor(a, b) > 0.5
    assert rope.fidelity_per_factor(a, a) == pytest.approx(1.0)


def test_to_real_preserves_norm_and_overlap():
    a = rope.encode(seqio.random_dna(500, 1), RopeParams(4, 2))
    ra = rope.to_real(a)
    assert ra.dtype == np.float64 and len(ra) == 2 * a.dim
    np.testing.assert_allclose(np.linalg.norm(ra), 1.0, atol=1e-12)


def test_hamming_fingerprint_fidelity():
    assert rope.hamming_fingerprint_fidelity("ACGT", "ACGT") == 1.0
    assert rope.hamming_fingerprint_fidelity("AAAA", "AAAT") == pytest.approx((3 / 4) ** 2)
    with pytest.raises(ValueError):
        rope.hamming_fingerprint_fidelity("A", "AA")


def test_concat():
    p = RopeParams(3, 1)
    a = rope.encode(seqio.random_dna(100, 1), p)
    b = rope.encode(seqio.random_dna(100, 2), p)
    c = rope.concat(a, b)
    assert c.params is None and c.dim == a.dim + b.dim
    np.testing.assert_allclose(np.linalg.norm(c.amplitudes), 1.0, atol=1e-12)
    with pytest.raises(ValueError):
        rope.save_encoding(c, io.BytesIO())


def test_weighted_encoding_matches_mixture():
    # one uncertain position: weighted encode equals the prob-weighted
    # sum of the concrete completions, renormalized
    p = RopeParams(2, 2, weighted=True)
    recs = seqio.parse_fasta(b">r\nACRGT\n", iupac="probabilistic")
    enc = rope.encode(recs[0][1], p)
    ra = naive_encode("ACAGT", 2, 2)
    rg = naive_encode("ACGGT", 2, 2)
    mix = (0.5 * ra + 0.5 * rg).reshape(-1)
    np.testing.assert_allclose(enc.amplitudes, mix / np.linalg.norm(mix),
                               atol=1e-12)


def test_weighted_dense_uncertainty_truncates():
    # many Ns force the truncated path; result stays a unit vector
    p = RopeParams(6, 2, weighted=True)
    recs = seqio.parse_fasta(b">r\nACGTANNNNNNAGTCA\n", iupac="probabilistic")
    enc = rope.encode(recs[0][1], p)
    assert not enc.degenerate
    np.testing.assert_allclose(np.linalg.norm(enc.amplitudes), 1.0, atol=1e-12)


def test_unweighted_params_ignore_probs():
    recs = seqio.parse_fasta(b">r\nACRGT\n", iupac="probabilistic")
    p = RopeParams(2, 2)
    enc = rope.encode(recs[0][1], p)
    np.testing.assert_allclose(enc.amplitudes, naive_unit("ACAGT", 2, 2),
                               atol=1e-12)


def test_save_load_roundtrip(tmp_path):
    p = RopeParams(5, 3, t=2, mode="fine_tuned")
    enc = rope.encode(seqio.random_dna(777, 9), p)
    path = tmp_path / "e.rdna"
    rope.save_encoding(enc, str(path))
    back = rope.load_encoding(str(path))
    assert back.params == p
    assert back.source_length == 777
    assert not back.degenerate
    np.testing.assert_allclose(back.amplitudes, enc.amplitudes, atol=1e-6)


def test_load_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad"
    path.write_bytes(b"NOPE" + b"\x00" * 40)
    with pytest.raises(ValueError):
        rope.load_encoding(str(path))


def test_encode_too_short():
    with pytest.raises(ValueError):
        rope.encode("AC", RopeParams(3, 1))
