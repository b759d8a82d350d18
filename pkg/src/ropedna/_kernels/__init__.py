"""Kernel backend selection.

The compiled Cython extension is used when it imported cleanly; set
ROPEDNA_PURE=1 to force the numpy/python fallback (used for parity
tests and benchmarks).
"""
import os

if os.environ.get("ROPEDNA_PURE") == "1":
    from . import _pure as _backend
else:
    try:
        from . import _ckern as _backend  # type: ignore[no-redef]
    except ImportError:
        from . import _pure as _backend

BACKEND = _backend.NAME
levenshtein_full = _backend.levenshtein_full
levenshtein_banded = _backend.levenshtein_banded
mutate_apply = _backend.mutate_apply
accumulate_phasors = _backend.accumulate_phasors
