import math

import numpy as np
import pytest

from littsim.config import MaterialParams
from littsim.damage import arrhenius_rate, damage_step

PARAMS = MaterialParams()


def log_domain_rate(T):
    """Independent evaluation of the rate for frozen comparisons."""
    return math.exp(math.log(3.1e98) - 6.3e5 / (8.31 * T))


@pytest.mark.parametrize("T, expected", [
    (333.0, 0.414888127501619),
    (310.0, 1.9149628067335225e-08),
    (373.0, 16633355680.126358),
])
def test_rate_matches_log_domain_oracle(T, expected):
    assert arrhenius_rate(T, PARAMS) == pytest.approx(expected, rel=1e-12)
    assert arrhenius_rate(T, PARAMS) == pytest.approx(log_domain_rate(T), rel=1e-12)


def test_rate_magnitudes():
    # coarse sanity on the three reference points
    assert arrhenius_rate(333.0, PARAMS) == pytest.approx(0.4, abs=0.05)
    assert arrhenius_rate(310.0, PARAMS) == pytest.approx(1.8e-8, rel=0.15)
    assert arrhenius_rate(373.0, PARAMS) == pytest.approx(1.6e10, rel=0.05)


def test_rate_finite_up_to_500K():
    T = np.linspace(250.0, 500.0, 2001)
    rates = arrhenius_rate(T, PARAMS)
    assert np.all(np.isfinite(rates))
    assert np.all(rates >= 0.0)
    # the rate can never exceed the frequency factor itself
    assert np.all(rates <= PARAMS.A_freq)


def test_rate_underflows_to_zero():
    assert arrhenius_rate(50.0, PARAMS) == 0.0


def test_damage_step_uniform_field():
    omega = np.zeros(5)
    T = np.full(5, 310.0)
    out = damage_step(omega, T, 1.0, PARAMS)
    assert out == pytest.approx(np.full(5, 1.9149628067335225e-08), rel=1e-12)


def test_zero_dt_leaves_state():
    omega = np.array([0.1, 0.2])
    out = damage_step(omega, np.array([400.0, 300.0]), 0.0, PARAMS)
    assert np.array_equal(out, omega)


def test_right_hand_sum_additive_at_constant_temperature():
    omega = np.array([0.3])
    T = np.array([345.0])
    two_small = damage_step(damage_step(omega, T, 0.5, PARAMS), T, 0.5, PARAMS)
    one_big = damage_step(omega, T, 1.0, PARAMS)
    assert two_small == pytest.approx(one_big, rel=1e-14)


def test_monotone_in_time():
    rng = np.random.default_rng(3)
    omega = np.zeros(50)
    for _ in range(20):
        T = 280.0 + 150.0 * rng.random(50)
        new = damage_step(omega, T, 0.7, PARAMS)
        assert np.all(new >= omega)
        omega = new
    assert np.all(np.isfinite(omega))
