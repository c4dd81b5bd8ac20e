import math

import numpy as np
import pytest

from tdmac.config import DacNonideality
from tdmac.frontend import (
    AnalogSample,
    CurrentSteeringDac,
    DacOutput,
    dac_current,
    integrate,
    reset_phase,
    thermal_noise_sigma,
)
from tdmac.pulsegen import PulseTrain, pulse_train


def train(duration):
    return PulseTrain(n_pulses=0, t_unit=duration, duration=duration)


@pytest.mark.parametrize("code, expected", [(0, 0.0), (15, 172.5e-9), (8, 92e-9)])
def test_dac_current_ideal(params, code, expected):
    assert dac_current(code, params).current == pytest.approx(expected, rel=1e-14, abs=0)


def test_dac_mismatch_is_static_and_thermometer(params):
    p = params.replace(dac_nonideality=DacNonideality(mismatch_sigma=0.05))
    dac = CurrentSteeringDac(p, np.random.default_rng(3))
    currents = [dac.current(c).current for c in range(16)]
    assert currents == [dac.current(c).current for c in range(16)]
    steps = np.diff(currents)
    # each extra code turns on one more unit cell, so the transfer stays monotone
    assert np.all(steps > 0)
    assert np.allclose(steps, p.i_lsb * (1 + dac.unit_errors))
    assert currents[15] != pytest.approx(15 * p.i_lsb, rel=1e-6)


def test_dac_mismatch_needs_rng(params):
    p = params.replace(dac_nonideality=DacNonideality(mismatch_sigma=0.05))
    with pytest.raises(ValueError):
        CurrentSteeringDac(p)


def test_integration_window_limit(params):
    # 300 mV across 200 fF at 165 nA takes 363.6 ns
    t_max = 0.3 * 200e-15 / 165e-9
    assert t_max == pytest.approx(363.636e-9, abs=1e-12)
    s = integrate(DacOutput(165e-9, 15), train(t_max), params)
    assert s.v_mac == pytest.approx(0.3, abs=1e-6)


def test_zero_time(params):
    s = integrate(DacOutput(150e-9, 13), train(0.0), params)
    assert s.v_mac == 0.0 and not s.saturated


def test_one_lsb_one_pulse(params):
    s = integrate(dac_current(1, params), pulse_train(1, params.t_clk_pulse), params)
    assert s.v_mac == pytest.approx(1.15e-3, rel=1e-12)


def test_saturation_clamps(params):
    s = integrate(DacOutput(172.5e-9, 15), train(400e-9), params)
    assert s.saturated and s.v_mac == params.v_sat


def test_bilinearity_exhaustive(params):
    scale = params.i_lsb * params.t_clk_pulse / params.c_int
    for w in range(16):
        for x in range(16):
            v = integrate(dac_current(w, params), pulse_train(x, params.t_clk_pulse), params).v_mac
            expected = w * x * scale
            if expected == 0:
                assert v == 0
            else:
                assert abs(v - expected) / expected < 1e-12


def test_no_default_product_saturates(params):
    worst = integrate(dac_current(15, params), pulse_train(15, params.t_clk_pulse), params)
    assert not worst.saturated
    assert worst.v_mac == pytest.approx(0.25875, rel=1e-12)


@pytest.mark.parametrize(
    "c, temperature, expected",
    [(200e-15, 300.0, 143.909e-6), (800e-15, 300.0, 143.909e-6 / 2)],
)
def test_thermal_noise_sigma(c, temperature, expected):
    assert thermal_noise_sigma(c, temperature) == pytest.approx(expected, rel=1e-5)


def test_thermal_noise_vanishes_at_low_temperature():
    assert thermal_noise_sigma(200e-15, 1e-30) < 1e-20
    with pytest.raises(ValueError):
        thermal_noise_sigma(0.0, 300.0)


def test_noise_monte_carlo(params):
    p = params.replace(noise_enabled=True)
    rng = np.random.default_rng(11)
    dac, pulses = dac_current(8, p), pulse_train(8, p.t_clk_pulse)
    v = np.array([integrate(dac, pulses, p, rng).v_mac for _ in range(100_000)])
    sigma = thermal_noise_sigma(p.c_int, p.temperature)
    assert abs(v.std(ddof=1) / sigma - 1) < 0.02
    assert v.mean() == pytest.approx(64 * p.volts_per_product, abs=5 * sigma / math.sqrt(1e5))


def test_noise_requires_rng(params):
    with pytest.raises(ValueError):
        integrate(dac_current(3, params), pulse_train(3, 20e-9), params.replace(noise_enabled=True))


def test_early_voltage_droop(params):
    dac, pulses = dac_current(15, params), pulse_train(15, params.t_clk_pulse)
    ideal = integrate(dac, pulses, params).v_mac
    p = params.replace(dac_nonideality=DacNonideality(v_early=2.0))
    drooped = integrate(dac, pulses, p).v_mac
    # closed form of dV/dt = I (1 - V/Va) / C
    expected = 2.0 * (1 - math.exp(-ideal / 2.0))
    assert drooped == pytest.approx(expected, rel=1e-14)
    assert drooped < ideal


def test_early_voltage_limit(params):
    dac, pulses = dac_current(15, params), pulse_train(15, params.t_clk_pulse)
    ideal = integrate(dac, pulses, params).v_mac
    p = params.replace(dac_nonideality=DacNonideality(v_early=1e6))
    assert abs(integrate(dac, pulses, p).v_mac - ideal) / ideal < 1e-6


def test_reset_phase():
    samples = [AnalogSample(0.25, False, 0), AnalogSample(0.1, True, 1)]
    once = reset_phase(samples)
    assert [(s.v_mac, s.saturated, s.cell_index) for s in once] == [(0.0, False, 0), (0.0, False, 1)]
    assert reset_phase(once) == once
    assert reset_phase([]) == []
