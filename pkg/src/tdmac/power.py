"""Supply-energy and dynamic-power primitives."""

from __future__ import annotations

from typing import Iterable

from .config import CircuitParams


def digital_power(alpha_sw: float, c_dig: float, v_dd: float, f_clk: float) -> float:
    """Dynamic power of clocked logic, alpha * C * Vdd^2 * f."""
    return alpha_sw * c_dig * v_dd**2 * f_clk


def counter_power(params: CircuitParams) -> float:
    pd = params.p_digital
    return digital_power(pd.alpha_sw, pd.c_dig, params.v_dd, 1.0 / params.t_clk_tdc)


def analog_energy(currents: Iterable[float], durations: Iterable[float], v_dd: float) -> float:
    """Energy drawn from the supply by the DAC sources while they integrate."""
    return sum(i * t for i, t in zip(currents, durations)) * v_dd


def counter_energy(params: CircuitParams, t_active: float) -> float:
    """Counter/control energy for ``t_active`` seconds of clocking."""
    return counter_power(params) * t_active
