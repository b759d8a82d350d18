"""Fidelity <-> mutation-rate calibration.

Monte-Carlo estimates of the mean fidelity per rate form a monotone
piecewise-linear curve (after isotonic cleanup); the inverse map predicts
a mutation rate from an observed fidelity, with per-rate RMSE reporting
and per-fragment acceptance thresholds for the mapper.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import rope, seqio
from .rope import RopeEncoding, RopeParams

ALWAYS_REJECT = math.inf  # threshold sentinel for degenerate fragments


@dataclass(frozen=True)
class CorrelationCurve:
    """Knots (mean_fidelity, rate) with rate strictly increasing and
    fidelity strictly decreasing; linear interpolation in fidelity."""

    fidelities: np.ndarray
    rates: np.ndarray
    n: int
    params: RopeParams
    samples_per_knot: int
    resampled: int = 0

    def __post_init__(self):
        if np.any(np.diff(self.rates) <= 0):
            raise ValueError("rates must be strictly increasing")
        if np.any(np.diff(self.fidelities) >= 0):
            raise ValueError("fidelities must be strictly decreasing")


@dataclass(frozen=True)
class RmseTable:
    rows: list[tuple[float, float]] = field(default_factory=list)


def _isotonic_decreasing(values: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit of a non-increasing sequence."""
    vals = list(-values)  # fit non-decreasing on the negation
    weights = [1.0] * len(vals)
    blocks = []
    for v, w in zip(vals, weights):
        blocks.append([v, w])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0]:
            v2, w2 = blocks.pop()
            blocks[-1][0] = (blocks[-1][0] * blocks[-1][1] + v2 * w2) / (blocks[-1][1] + w2)
            blocks[-1][1] += w2
    out = []
    for v, w in blocks:
        out.extend([v] * int(w))
    return -np.asarray(out)


def _sample_fidelity(n: int, params: RopeParams, rate: float,
                     rng: np.random.Generator) -> tuple[float, int]:
    """Fidelity of one random (sequence, mutant) pair; degenerate
    encodings are resampled and the resample count is returned."""
    resampled = 0
    while True:
        seq = seqio.random_dna(n, int(rng.integers(0, 2 ** 63)))
        mut, _ = seqio.mutate(seq, seqio.MutationSpec(
            rate=rate, seed=int(rng.integers(0, 2 ** 63))))
        if len(mut) < params.s:
            resampled += 1
            continue
        a, b = rope.encode(seq, params), rope.encode(mut, params)
        if a.degenerate or b.degenerate:
            resampled += 1
            continue
        return rope.fidelity(a, b), resampled


def fit_curve(n: int, params: RopeParams, rate_grid, samples_per_knot: int,
              seed: int) -> CorrelationCurve:
    """Monte-Carlo mean fidelity per rate, then isotonic cleanup."""
    rates = np.asarray(sorted(rate_grid), dtype=np.float64)
    if rates.size == 0 or rates[0] <= 0.0 or rates[-1] >= 0.5:
        raise ValueError("rate grid must lie in (0, 0.5)")
    if np.any(np.diff(rates) <= 0):
        raise ValueError("rate grid must be strictly increasing")
    if samples_per_knot < 20:
        raise ValueError("samples_per_knot must be >= 20")
    rng = seqio.make_rng(seed)
    means = np.empty(len(rates))
    resampled = 0
    for i, rate in enumerate(rates):
        fids = np.empty(samples_per_knot)
        for j in range(samples_per_knot):
            fids[j], extra = _sample_fidelity(n, params, float(rate), rng)
            resampled += extra
        means[i] = fids.mean()
    means = _isotonic_decreasing(means)
    # break isotonic ties so interpolation stays invertible
    means = means - np.arange(len(means)) * 1e-12
    return CorrelationCurve(means, rates, n, params, samples_per_knot, resampled)


def predict_rate(curve: CorrelationCurve, fid: float) -> float:
    """Inverse interpolation fidelity -> rate, clamped to the grid ends."""
    if not 0.0 <= fid <= 1.0 + 1e-9:
        raise ValueError("fidelity must be in [0, 1]")
    f, r = curve.fidelities, curve.rates
    if fid >= f[0]:
        return float(r[0])
    if fid <= f[-1]:
        return float(r[-1])
    # fidelities are decreasing; np.interp wants increasing x
    return float(np.interp(fid, f[::-1], r[::-1]))


def rmse(curve: CorrelationCurve, n: int, params: RopeParams, eval_rates,
         samples: int, seed: int) -> RmseTable:
    """Per-rate RMSE of predicted vs true mutation rate."""
    rng = seqio.make_rng(seed)
    rows = []
    for rate in eval_rates:
        if not curve.rates[0] <= rate <= curve.rates[-1]:
            raise ValueError("eval rate outside the fitted grid span")
        errs = np.empty(samples)
        for j in range(samples):
            fid, _ = _sample_fidelity(n, params, float(rate), rng)
            errs[j] = predict_rate(curve, fid) - rate
        rows.append((float(rate), float(np.sqrt(np.mean(errs ** 2)))))
    return RmseTable(rows)


def estimate_thresholds(index, ref: seqio.DnaSequence, target_rate: float,
                        samples_per_fragment: int, seed: int,
                        z: float = 2.0) -> np.ndarray:
    """Per-fragment fidelity thresholds: empirical mean - z*stddev of the
    fidelity between a fragment and its rate-`target_rate` mutations.

    Mutations include a head-cut shift of step/2, reflecting index
    discretization. Degenerate fragments get the ALWAYS_REJECT sentinel.
    """
    if not 0.0 < target_rate < 0.5:
        raise ValueError("target_rate must be in (0, 0.5)")
    rng = seqio.make_rng(seed)
    params = index.params
    thresholds = np.empty(index.fragment_count)
    shift = index.step // 2
    for i in range(index.fragment_count):
        start = int(index.offsets[i])
        frag = ref.slice(start, start + index.window)
        base = rope.encode(frag, params)
        if base.degenerate:
            thresholds[i] = ALWAYS_REJECT
            continue
        fids = []
        for _ in range(samples_per_fragment):
            mut, _ = seqio.mutate(frag, seqio.MutationSpec(
                rate=target_rate, shift=shift,
                seed=int(rng.integers(0, 2 ** 63))))
            enc = rope.encode(mut, params)
            if enc.degenerate:
                continue
            fids.append(rope.fidelity(base, enc))
        if not fids:
            thresholds[i] = ALWAYS_REJECT
            continue
        fids = np.asarray(fids)
        thresholds[i] = float(fids.mean() - z * fids.std())
    return thresholds


# ---------------------------------------------------------------------------
# serialization

def curve_to_csv(curve: CorrelationCurve, table: RmseTable | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    rmse_at = dict(table.rows) if table is not None else {}
    w.writerow(["rate (fraction)", "mean_fidelity", "rmse"])
    for f, r in zip(curve.fidelities, curve.rates):
        w.writerow([f"{r:.6g}", f"{f:.8g}",
                    f"{rmse_at[r]:.6g}" if r in rmse_at else ""])
    return buf.getvalue()


def curve_to_json(curve: CorrelationCurve, table: RmseTable | None = None) -> str:
    doc = {
        "schema_version": 1,
        "meta": {
            "n": curve.n,
            "params": {"s": curve.params.s, "m": curve.params.m,
                       "t": curve.params.t, "mode": curve.params.mode,
                       "weighted": curve.params.weighted},
            "samples_per_knot": curve.samples_per_knot,
            "resampled": curve.resampled,
        },
        "knots": [{"rate": float(r), "fidelity": float(f)}
                  for f, r in zip(curve.fidelities, curve.rates)],
    }
    if table is not None:
        doc["rmse"] = [{"rate": r, "rmse": e} for r, e in table.rows]
    return json.dumps(doc, indent=2, sort_keys=True)
