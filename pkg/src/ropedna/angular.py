"""Angular circuit encoding: real parameter vectors become rotation angles
in a brickwork circuit, plus a small exact statevector simulator.

Gate conventions: R_theta(a) = exp(-i a theta/2) for theta in {X, Y, Z};
ZZMax = exp(-i pi/4 Z@Z); Rxxyyzz(a, b, c) = exp(-i pi/2 (a XX + b YY + c ZZ)).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .seqio import make_rng

SIMULATOR_CAP = 22  # dense f64 amplitudes, ~64 MiB at the cap

_GATE_ARITY = {"H": (1, 0), "Rx": (1, 1), "Ry": (1, 1), "Rz": (1, 1),
               "ZZMax": (2, 0), "Rxxyyzz": (2, 3)}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in _GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        nq, np_ = _GATE_ARITY[self.kind]
        if len(self.qubits) != nq:
            raise ValueError(f"{self.kind} acts on {nq} qubit(s)")
        if len(self.params) != np_:
            raise ValueError(f"{self.kind} takes {np_} parameter(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("qubit indices must be distinct")


@dataclass(frozen=True)
class Circuit:
    """Ordered layers of gates. Angle parameters are stored already scaled;
    `scale` records the multiplier that was applied at build time."""

    width: int
    layers: tuple[tuple[Gate, ...], ...]
    variant: str
    scale: float
    param_budget: int

    def __post_init__(self):
        for layer in self.layers:
            busy = set()
            for g in layer:
                if max(g.qubits, default=-1) >= self.width:
                    raise ValueError("gate qubit index exceeds circuit width")
                if len(g.qubits) == 2:
                    if busy & set(g.qubits):
                        raise ValueError("two-qubit layer is not a matching")
                    busy.update(g.qubits)


def layer_counts(p: int, q: int) -> tuple[int, int]:
    """Rotation/two-qubit layer counts for p parameters on q qubits at
    2 parameters per qubit per rotation layer; leftovers extend the last
    rotation layer rather than opening a new one."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    if p < 2 * q:
        return 1, 0
    single = p // (2 * q)
    return single, single - 1


def _brick_pairs(q: int, layer_idx: int) -> list[tuple[int, int]]:
    """Brickwork matching, shifted by 1 per successive layer; the wrap
    pair (q-1, 0) appears on odd layers when q is even."""
    start = layer_idx % 2
    pairs = [(a, a + 1) for a in range(start, q - 1, 2)]
    if start == 1 and q % 2 == 0:
        pairs.append((q - 1, 0))
    return pairs


def build_standard(real_params, q: int, scale: float = 1.0) -> Circuit:
    """Brickwork of fixed ZZMax layers between rotation layers; each
    rotation layer applies Ry then Rx per qubit (2 parameters per qubit),
    with an H sub-layer starting rotation layers 1, 3, 5, ..."""
    params = np.asarray(real_params, dtype=np.float64)
    if q < 2:
        raise ValueError("need at least 2 qubits")
    if params.size == 0:
        raise ValueError("empty parameter vector")
    single, two = layer_counts(len(params), q)
    layers: list[tuple[Gate, ...]] = []
    p = 0
    for li in range(single):
        gates: list[Gate] = []
        if li % 2 == 0:
            gates.extend(Gate("H", (qb,)) for qb in range(q))
        budget = 2 * q
        if li == single - 1:
            budget = len(params) - p  # leftovers extend the last layer
        qb, kinds = 0, ("Ry", "Rx")
        for j in range(budget):
            gates.append(Gate(kinds[j % 2], (qb,), (scale * float(params[p]),)))
            p += 1
            if j % 2 == 1:
                qb = (qb + 1) % q
        layers.append(tuple(gates))
        if li < two:
            layers.append(tuple(Gate("ZZMax", pair)
                                for pair in _brick_pairs(q, li)))
    return Circuit(q, tuple(layers), "standard", scale, len(params))


def build_compact(real_params, q: int, scale: float = 1.0) -> Circuit:
    """Rz-Rx-Rz rotation layers (3 parameters per qubit) alternating with
    parameterized Rxxyyzz layers (3 per gate) until the vector is
    exhausted; a gate short of parameters is zero-padded."""
    params = np.asarray(real_params, dtype=np.float64)
    if q < 2:
        raise ValueError("need at least 2 qubits")
    if params.size == 0:
        raise ValueError("empty parameter vector")

    p = 0

    def take(k: int) -> tuple[float, ...]:
        nonlocal p
        got = [scale * float(params[p + j]) if p + j < len(params) else 0.0
               for j in range(k)]
        p += min(k, len(params) - p)
        return tuple(got)

    layers: list[tuple[Gate, ...]] = []
    li = 0
    while p < len(params):
        gates = []
        for qb in range(q):
            if p >= len(params):
                break
            a, b, c = take(3)
            gates.extend([Gate("Rz", (qb,), (a,)), Gate("Rx", (qb,), (b,)),
                          Gate("Rz", (qb,), (c,))])
        layers.append(tuple(gates))
        if p >= len(params):
            break
        gates = []
        for pair in _brick_pairs(q, li):
            if p >= len(params):
                break
            gates.append(Gate("Rxxyyzz", pair, take(3)))
        if gates:
            layers.append(tuple(gates))
        li += 1
    return Circuit(q, tuple(layers), "compact", scale, len(params))


# ---------------------------------------------------------------------------
# simulation

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_ZZMAX = np.diag(np.exp(-1j * np.pi / 4 * np.array([1, -1, -1, 1])))
_XX = np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]]).astype(np.complex128)
_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
_ZZ = np.diag([1.0, -1.0, -1.0, 1.0]).astype(np.complex128)


def _gate_matrix(g: Gate) -> np.ndarray:
    if g.kind == "H":
        return _H
    if g.kind == "ZZMax":
        return _ZZMAX
    if g.kind in ("Rx", "Ry", "Rz"):
        (a,) = g.params
        c, s = math.cos(a / 2), math.sin(a / 2)
        if g.kind == "Rx":
            return np.array([[c, -1j * s], [-1j * s, c]])
        if g.kind == "Ry":
            return np.array([[c, -s], [s, c]], dtype=np.complex128)
        return np.diag([np.exp(-1j * a / 2), np.exp(1j * a / 2)])
    a, b, c = g.params
    return expm(-1j * np.pi / 2 * (a * _XX + b * _YY + c * _ZZ))


def _apply(state: np.ndarray, mat: np.ndarray, qubits: tuple[int, ...],
           width: int) -> np.ndarray:
    k = len(qubits)
    state = np.moveaxis(state.reshape([2] * width), qubits, range(k))
    state = np.tensordot(mat.reshape([2] * (2 * k)), state,
                         axes=(list(range(k, 2 * k)), list(range(k))))
    return np.moveaxis(state, range(k), qubits)


def simulate(circuit: Circuit) -> np.ndarray:
    """Exact dense statevector of the circuit applied to |0...0>."""
    if circuit.width > SIMULATOR_CAP:
        raise ValueError(f"width {circuit.width} exceeds the simulator cap "
                         f"({SIMULATOR_CAP} qubits)")
    state = np.zeros([2] * circuit.width, dtype=np.complex128)
    state[(0,) * circuit.width] = 1.0
    for layer in circuit.layers:
        for g in layer:
            state = _apply(state, _gate_matrix(g), g.qubits, circuit.width)
    return state.reshape(-1)


def mirror_fidelity_exact(params_a, params_b, q: int, variant: str = "standard",
                          scale: float = 1.0) -> float:
    """Return probability of the mirror experiment |<0|U_b^dag U_a|0>|^2,
    computed as the squared overlap of the two prepared states."""
    params_a = np.asarray(params_a, dtype=np.float64)
    params_b = np.asarray(params_b, dtype=np.float64)
    if len(params_a) != len(params_b):
        raise ValueError("parameter vectors must have equal length")
    build = build_standard if variant == "standard" else build_compact
    psi_a = simulate(build(params_a, q, scale))
    psi_b = simulate(build(params_b, q, scale))
    return float(abs(np.vdot(psi_b, psi_a)) ** 2)


def sample_shots(probability: float, shots: int, seed: int) -> int:
    """Binomial draw of zero-state observations; deterministic per seed."""
    if not 0.0 <= probability <= 1.0:
        raise ValueError("probability must be in [0, 1]")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    return int(make_rng(seed).binomial(shots, probability))


# ---------------------------------------------------------------------------
# circuit JSON (canonical form: serialize -> parse -> serialize is stable)

def serialize(circuit: Circuit) -> str:
    doc = {
        "schema_version": 1,
        "width": circuit.width,
        "variant": circuit.variant,
        "scale": circuit.scale,
        "param_budget": circuit.param_budget,
        "layers": [
            {"kind": ("two" if layer and len(layer[-1].qubits) == 2 else "single"),
             "gates": [{"kind": g.kind, "qubits": list(g.qubits),
                        "params": list(g.params)} for g in layer]}
            for layer in circuit.layers
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def parse_circuit(text: str) -> Circuit:
    try:
        doc = json.loads(text)
        layers = tuple(
            tuple(Gate(g["kind"], tuple(g["qubits"]), tuple(g["params"]))
                  for g in layer["gates"])
            for layer in doc["layers"])
        return Circuit(doc["width"], layers, doc["variant"], doc["scale"],
                       doc["param_budget"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed circuit document: {exc}") from exc
