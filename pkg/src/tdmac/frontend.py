"""Current-steering DAC and capacitor integration (the multiply step)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import BOLTZMANN, CircuitParams
from .pulsegen import PulseTrain
from .validation import check_code


@dataclass(frozen=True)
class DacOutput:
    current: float
    code: int


@dataclass(frozen=True)
class AnalogSample:
    v_mac: float
    saturated: bool = False
    cell_index: int = 0


def draw_unit_mismatch(params: CircuitParams, rng: np.random.Generator | None) -> np.ndarray | None:
    """Relative error of each thermometer unit cell, drawn once per instance.

    Returns None when mismatch is disabled.
    """
    nonideal = params.dac_nonideality
    if nonideal is None or nonideal.mismatch_sigma == 0:
        return None
    if rng is None:
        raise ValueError("mismatch enabled but no random generator supplied")
    return rng.normal(0.0, nonideal.mismatch_sigma, size=params.max_code)


def dac_current(code: int, params: CircuitParams, unit_errors: np.ndarray | None = None) -> DacOutput:
    code = check_code(code)
    if unit_errors is None:
        return DacOutput(current=code * params.i_lsb, code=code)
    # thermometer decoding: code k turns on the first k unit cells
    units = params.i_lsb * (1.0 + unit_errors[:code])
    return DacOutput(current=math.fsum(units), code=code)


class CurrentSteeringDac:
    """A DAC instance with its static unit-cell mismatch frozen at construction."""

    def __init__(self, params: CircuitParams, rng: np.random.Generator | None = None):
        self.params = params
        self.unit_errors = draw_unit_mismatch(params, rng)

    def current(self, code: int) -> DacOutput:
        return dac_current(code, self.params, self.unit_errors)


def thermal_noise_sigma(c: float, temperature: float) -> float:
    if not (c > 0 and temperature > 0):
        raise ValueError("capacitance and temperature must be positive")
    return math.sqrt(BOLTZMANN * temperature / c)


def max_integration_time(v_max: float, c: float, current: float) -> float:
    """Longest pulse window that keeps a constant-current charge below ``v_max``."""
    if not (v_max > 0 and c > 0 and current > 0):
        raise ValueError("v_max, c and current must be positive")
    return v_max * c / current


def ideal_voltage(current: float, duration: float, params: CircuitParams) -> float:
    """Capacitor voltage after integrating ``current`` for ``duration``.

    With an Early voltage set, the source current droops as the node charges;
    dV/dt = I (1 - V/Va) / C integrates to Va (1 - exp(-I T / (C Va))).
    """
    charge_v = current * duration / params.c_int
    nonideal = params.dac_nonideality
    if nonideal is not None and nonideal.v_early is not None:
        v_early = nonideal.v_early
        return -v_early * math.expm1(-charge_v / v_early)
    return charge_v


def integrate(
    dac: DacOutput,
    pulses: PulseTrain,
    params: CircuitParams,
    rng: np.random.Generator | None = None,
    cell_index: int = 0,
) -> AnalogSample:
    v = ideal_voltage(dac.current, pulses.duration, params)
    saturated = v > params.v_sat
    if params.noise_enabled:
        if rng is None:
            raise ValueError("noise enabled but no random generator supplied")
        v += rng.normal(0.0, thermal_noise_sigma(params.c_int, params.temperature))
    v = min(max(v, 0.0), params.v_sat)
    return AnalogSample(v_mac=v, saturated=saturated, cell_index=cell_index)


def reset_phase(samples: Sequence[AnalogSample]) -> list[AnalogSample]:
    return [AnalogSample(0.0, False, s.cell_index) for s in samples]
