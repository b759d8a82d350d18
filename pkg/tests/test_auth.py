import math
from dataclasses import replace

import pytest

from ropedna import auth
from ropedna.rope import RopeParams

P = RopeParams(5, 4)


def test_required_shots_values():
    assert auth.required_shots(0.01, 0.35) == 76
    assert auth.required_shots(math.exp(-2), 1.0) == 4
    assert auth.required_shots(0.01, 0.1) == 922


def test_required_shots_validation():
    with pytest.raises(ValueError):
        auth.required_shots(0.0, 0.5)
    with pytest.raises(ValueError):
        auth.required_shots(0.01, 0.0)
    with pytest.raises(ValueError):
        auth.required_shots(0.01, 1.5)


def test_decide_midpoint_boundary():
    # threshold (0.6 + 0.2) / 2 = 0.4; the boundary accepts
    assert auth.decide(40, 100, 0.6, 0.2) == "accept"
    assert auth.decide(39, 100, 0.6, 0.2) == "reject"
    assert auth.decide(100, 100, 0.6, 0.2) == "accept"
    with pytest.raises(ValueError):
        auth.decide(0, 0, 0.6, 0.2)


def test_config_validation():
    base = dict(n=100, a=10, b=30, epsilon=0.01, params=P, qubits=12,
                f_a=0.6, f_b=0.2, shots=76)
    auth.AuthConfig(**base)
    with pytest.raises(ValueError):
        auth.AuthConfig(**{**base, "a": 30, "b": 10})
    with pytest.raises(ValueError):
        auth.AuthConfig(**{**base, "epsilon": 0.7})
    with pytest.raises(ValueError):
        auth.AuthConfig(**{**base, "f_a": 0.1})
    with pytest.raises(ValueError):
        auth.AuthConfig(**{**base, "mode": "hardware"})


@pytest.fixture(scope="module")
def config():
    return auth.calibrate_config(1500, P, a=150, b=450, epsilon=0.01,
                                 samples=20, seed=1)


def test_calibrate_config(config):
    assert config.f_a > config.f_b
    assert config.shots == auth.required_shots(0.01, config.f_a - config.f_b)
    assert config.qubits == 12  # ceil(log2(4 * 4^5))


def test_simulate_protocol_ideal(config):
    report = auth.simulate_protocol(config, 200, seed=2)
    assert report["false_reject_rate"] <= 0.05
    assert report["false_accept_rate"] <= 0.05
    assert report["qubit_cost"] == config.qubits * config.shots
    assert report["trials"] == 200


def test_simulate_protocol_deterministic(config):
    a = auth.simulate_protocol(config, 100, seed=3)
    assert a == auth.simulate_protocol(config, 100, seed=3)


def test_simulate_protocol_trial_floor(config):
    with pytest.raises(ValueError):
        auth.simulate_protocol(config, 50, seed=0)


def test_angular_mode_small():
    p = RopeParams(2, 2)  # dim 32 -> 6 qubits of real parameters
    cfg = auth.calibrate_config(300, p, a=30, b=90, epsilon=0.05,
                                samples=20, seed=4, qubits=6, mode="angular")
    report = auth.simulate_protocol(cfg, 100, seed=5)
    assert 0.0 <= report["false_reject_rate"] <= 1.0
    assert 0.0 <= report["false_accept_rate"] <= 1.0


def test_noise_factor_raises_rejections(config):
    noisy = replace(config, noise_factor=0.5)
    report = auth.simulate_protocol(noisy, 100, seed=6)
    assert report["false_reject_rate"] > 0.5
