"""Compare the compiled kernels against the numpy fallback.

Run: python3 benchmarks/bench_kernels.py
"""
import time

import numpy as np

from ropedna import seqio
from ropedna._kernels import _pure

try:
    from ropedna._kernels import _ckern
except ImportError:
    _ckern = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def bench(name, pure_fn, c_fn, *args):
    tp, rp = timeit(pure_fn, *args)
    line = f"{name:<28} pure {tp * 1e3:9.2f} ms"
    if c_fn is not None:
        tc, rc = timeit(c_fn, *args)
        line += (f"   cython {tc * 1e3:9.2f} ms   x{tp / tc:6.1f}"
                 f"   match={_same(rp, rc)}")
    print(line)


def main():
    rng = seqio.make_rng(0)
    if _ckern is None:
        print("compiled backend unavailable; timing fallback only")

    a = rng.integers(0, 4, 4000).astype(np.uint8)
    b = rng.integers(0, 4, 4000).astype(np.uint8)
    bench("levenshtein 4k x 4k", _pure.levenshtein_full,
          getattr(_ckern, "levenshtein_full", None), a, b)
    bench("banded lev 4k (band 64)", _pure.levenshtein_banded,
          getattr(_ckern, "levenshtein_banded", None), a, b, 64)

    n, edits = 1_000_000, 200_000
    codes = rng.integers(0, 4, n).astype(np.uint8)
    kinds = rng.integers(0, 3, edits).astype(np.uint8)
    u_pos = rng.random(edits)
    ins = rng.integers(0, 4, edits).astype(np.uint8)
    sub = rng.integers(1, 4, edits).astype(np.uint8)
    bench("mutate 1M bp, 200k edits", _pure.mutate_apply,
          getattr(_ckern, "mutate_apply", None), codes, kinds, u_pos, ins, sub)

    locs = 1_000_000
    smers = rng.integers(0, 4 ** 5, locs).astype(np.int64)
    phases = np.exp(2j * np.pi * rng.random((4, locs)))
    bench("phasor accumulate 1M x 4", _pure.accumulate_phasors,
          getattr(_ckern, "accumulate_phasors", None), smers, phases, 4 ** 5)


if __name__ == "__main__":
    main()
