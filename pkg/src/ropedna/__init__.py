"""Rotary-phase DNA fingerprints: complex phasor encodings whose pairwise
fidelity tracks edit distance, a fragment-index read mapper with an O(1)
per-base sliding refinement, parameterised circuit encodings with an exact
statevector simulator, and an authentication protocol simulation."""

from ._kernels import BACKEND
from .angular import (Circuit, Gate, build_compact, build_standard,
                      layer_counts, mirror_fidelity_exact, parse_circuit,
                      sample_shots, serialize, simulate)
from .auth import (AuthConfig, calibrate_config, decide, required_shots,
                   simulate_protocol)
from .calib import (ALWAYS_REJECT, CorrelationCurve, RmseTable,
                    estimate_thresholds, fit_curve, predict_rate, rmse)
from .lev import EditDistanceResult, levenshtein, levenshtein_banded
from .rope import (RopeEncoding, RopeParams, concat, encode,
                   encode_matrix_form, fidelity, fidelity_per_factor,
                   hamming_fingerprint_fidelity, load_encoding,
                   save_encoding, smer_codes, to_real)
from .rotormap import (FragmentIndex, MappingResult, build_index, init_slide,
                       load_index, refine, save_index, search_threshold,
                       search_top1, slide_update)
from .seqio import (DnaSequence, FastaParseError, MutationSpec, make_rng,
                    mutate, parse_fasta, parse_fastq, random_dna,
                    reverse_complement, serialize_fasta)

__version__ = "1.0.0"

__all__ = [
    "BACKEND", "__version__",
    "DnaSequence", "FastaParseError", "MutationSpec", "make_rng", "mutate",
    "parse_fasta", "parse_fastq", "random_dna", "reverse_complement",
    "serialize_fasta",
    "EditDistanceResult", "levenshtein", "levenshtein_banded",
    "RopeParams", "RopeEncoding", "smer_codes", "encode",
    "encode_matrix_form", "fidelity", "fidelity_per_factor", "to_real",
    "hamming_fingerprint_fidelity", "concat", "save_encoding",
    "load_encoding",
    "ALWAYS_REJECT", "CorrelationCurve", "RmseTable", "fit_curve",
    "predict_rate", "rmse", "estimate_thresholds",
    "FragmentIndex", "MappingResult", "build_index", "search_top1",
    "search_threshold", "init_slide", "slide_update", "refine",
    "save_index", "load_index",
    "Gate", "Circuit", "layer_counts", "build_standard", "build_compact",
    "simulate", "mirror_fidelity_exact", "sample_shots", "serialize",
    "parse_circuit",
    "AuthConfig", "required_shots", "decide", "calibrate_config",
    "simulate_protocol",
]
