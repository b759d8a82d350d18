"""Exact Levenshtein distance (full and banded), the ground-truth oracle
used everywhere else in the package."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .seqio import DnaSequence

SIZE_GUARD = 10 ** 9


@dataclass(frozen=True)
class EditDistanceResult:
    distance: int
    exact: bool
    band: int | None = None


def _codes(x) -> np.ndarray:
    if isinstance(x, DnaSequence):
        if x.probs is not None:
            # distances are over concrete strings; collapse to argmax base
            return np.argmax(x.probs, axis=1).astype(np.uint8)
        return x.codes
    if isinstance(x, str):
        return np.frombuffer(x.encode("utf-8"), dtype=np.uint8)
    return np.ascontiguousarray(x, dtype=np.uint8)


def levenshtein(a, b) -> EditDistanceResult:
    """Exact distance by two-row DP. Guards |a|*|b| <= 10^9; use
    levenshtein_banded beyond that."""
    ca, cb = _codes(a), _codes(b)
    if len(ca) * len(cb) > SIZE_GUARD:
        raise ValueError("input too large for full DP; use levenshtein_banded")
    return EditDistanceResult(int(_kernels.levenshtein_full(ca, cb)), True)


def levenshtein_banded(a, b, band: int) -> EditDistanceResult:
    """Exact when the true distance is <= band; otherwise reports the
    band as a lower bound with exact=False."""
    ca, cb = _codes(a), _codes(b)
    if band < abs(len(ca) - len(cb)):
        raise ValueError("band smaller than the length difference")
    d = int(_kernels.levenshtein_banded(ca, cb, band))
    if d <= band:
        return EditDistanceResult(d, True, band)
    return EditDistanceResult(band, False, band)
