"""One-way DNA authentication: gap edit-distance decision from repeated
zero-state observations, with Hoeffding shot budgeting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import angular, calib, rope, seqio
from .rope import RopeParams


@dataclass(frozen=True)
class AuthConfig:
    """Protocol configuration. `f_a`/`f_b` are the calibrated expected
    fidelities at edit rates a/n and b/n; the decision threshold is their
    midpoint. `noise_factor` optionally rescales fidelities to mimic a
    hardware fidelity drop (default off)."""

    n: int
    a: int
    b: int
    epsilon: float
    params: RopeParams
    qubits: int
    f_a: float
    f_b: float
    shots: int
    mode: str = "ideal"       # "ideal" (raw fingerprint fidelity) or "angular"
    variant: str = "standard"
    scale: float = 1.0
    noise_factor: float = 1.0

    def __post_init__(self):
        if not 0 < self.a < self.b < self.n:
            raise ValueError("need 0 < a < b < n")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must be in (0, 0.5)")
        if not self.f_a > self.f_b:
            raise ValueError("f_a must exceed f_b")
        if self.mode not in ("ideal", "angular"):
            raise ValueError("mode must be 'ideal' or 'angular'")


def required_shots(epsilon: float, delta_f: float) -> int:
    """Hoeffding budget ceil(-2 ln(eps) / delta_f^2) to separate two
    Bernoulli means delta_f apart with error probability epsilon."""
    if not 0.0 < delta_f <= 1.0:
        raise ValueError("delta_f must be in (0, 1]")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must be in (0, 1)")
    return math.ceil(-2.0 * math.log(epsilon) / delta_f ** 2)


def decide(zero_count: int, shots: int, f_a: float, f_b: float) -> str:
    """Midpoint rule: accept iff zero_count/shots >= (f_a + f_b)/2.
    The boundary itself accepts."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    return "accept" if zero_count / shots >= (f_a + f_b) / 2.0 else "reject"


def calibrate_config(n: int, params: RopeParams, a: int, b: int,
                     epsilon: float, samples: int, seed: int,
                     qubits: int | None = None, mode: str = "ideal",
                     variant: str = "standard", scale: float = 1.0,
                     noise_factor: float = 1.0) -> AuthConfig:
    """Estimate f_a and f_b by Monte-Carlo and size the shot budget."""
    rng = seqio.make_rng(seed)
    means = []
    for rate in (a / n, b / n):
        fids = [calib._sample_fidelity(n, params, rate, rng)[0]
                for _ in range(samples)]
        means.append(float(np.mean(fids)))
    f_a, f_b = means
    if qubits is None:
        qubits = max(1, int(math.ceil(math.log2(params.dim))))
    shots = required_shots(epsilon, f_a - f_b)
    return AuthConfig(n, a, b, epsilon, params, qubits, f_a, f_b, shots,
                      mode=mode, variant=variant, scale=scale,
                      noise_factor=noise_factor)


def _pair_fidelity(config: AuthConfig, seq, mut) -> float | None:
    """Fidelity the verifier would measure for one prover message; None
    when an encoding degenerates (caller resamples)."""
    enc_a = rope.encode(seq, config.params)
    enc_b = rope.encode(mut, config.params)
    if enc_a.degenerate or enc_b.degenerate:
        return None
    if config.mode == "ideal":
        fid = rope.fidelity(enc_a, enc_b)
    else:
        fid = angular.mirror_fidelity_exact(rope.to_real(enc_a),
                                            rope.to_real(enc_b),
                                            config.qubits, config.variant,
                                            config.scale)
    return fid * config.noise_factor


def simulate_protocol(config: AuthConfig, trials: int, seed: int,
                      exact_fidelity: bool = False) -> dict:
    """Run honest/impostor trials (half each, alternating) and tally the
    error rates. With exact_fidelity=True the shot sampling is bypassed
    and the fidelity itself is thresholded (an infinite-shot proxy)."""
    if trials < 100:
        raise ValueError("need at least 100 trials")
    rng = seqio.make_rng(seed)
    threshold = (config.f_a + config.f_b) / 2.0
    false_reject = false_accept = 0
    honest_trials = impostor_trials = 0
    resampled = 0
    for trial in range(trials):
        honest = trial % 2 == 0
        rate = (config.a if honest else config.b) / config.n
        while True:
            seq = seqio.random_dna(config.n, int(rng.integers(0, 2 ** 63)))
            mut, _ = seqio.mutate(seq, seqio.MutationSpec(
                rate=rate, seed=int(rng.integers(0, 2 ** 63))))
            fid = _pair_fidelity(config, seq, mut)
            if fid is not None:
                break
            resampled += 1
        if exact_fidelity:
            verdict = "accept" if fid >= threshold else "reject"
        else:
            zeros = angular.sample_shots(min(fid, 1.0), config.shots,
                                         int(rng.integers(0, 2 ** 63)))
            verdict = decide(zeros, config.shots, config.f_a, config.f_b)
        if honest:
            honest_trials += 1
            if verdict == "reject":
                false_reject += 1
        else:
            impostor_trials += 1
            if verdict == "accept":
                false_accept += 1
    return {
        "false_reject_rate": false_reject / honest_trials,
        "false_accept_rate": false_accept / impostor_trials,
        "qubit_cost": config.qubits * config.shots,
        "shots": config.shots,
        "trials": trials,
        "resampled": resampled,
    }
