import numpy as np
import pytest

from ropedna import seqio

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def python_levenshtein(a: str, b: str) -> int:
    """Textbook quadratic DP, kept independent of the package kernels."""
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def naive_encode(seq: str, s: int, m: int, t=None, mode="default"):
    """Loop-based reference encoder (pre-normalization bucket matrix)."""
    n = len(seq)
    codes = ["ACGT".index(c) for c in seq]
    if mode == "fine_tuned":
        factors = [2.0 * (k - 1.0) / (m - 1.0) + 1.0 for k in range(1, m + 1)]
    else:
        factors = [float(k) for k in range(1, m + 1)]
    fold = 4 ** (t if t is not None else s)
    raw = np.zeros((m, fold), dtype=np.complex128)
    for loc in range(n - s + 1):
        code = 0
        for j in range(s):
            code = code * 4 + codes[loc + j]
        bucket = code % fold
        for k, f in enumerate(factors):
            r = (f * loc) % n
            raw[k, bucket] += np.exp(2j * np.pi * r / n)
    return raw


def naive_unit(seq: str, s: int, m: int, t=None, mode="default"):
    flat = naive_encode(seq, s, m, t, mode).reshape(-1)
    return flat / np.linalg.norm(flat)


@pytest.fixture
def rng():
    return seqio.make_rng(12345)


def random_string(rng, length: int) -> str:
    return "".join("ACGT"[i] for i in rng.integers(0, 4, length))
