"""Three-phase MAC sequencing for the cascade and counter architectures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import frontend, pulsegen
from ._rng import MISMATCH_STREAM, NOISE_STREAM, rng_for
from .config import CircuitParams, check_params, default_params
from .delay import CutoffError, cascade_delay, cell_delay
from .oracle import oracle_mac
from .power import analog_energy, counter_energy
from .validation import VectorOperands

Architecture = Literal["cascade", "counter"]
ARCHITECTURES = ("cascade", "counter")


@dataclass(frozen=True)
class MacReadout:
    architecture: str
    d_out: int
    t_acc: float
    oracle: int
    latency: float
    energy: float
    saturated_cells: tuple[int, ...] = ()
    cell_delays: tuple[float, ...] = ()
    cell_counts: tuple[int, ...] = ()


@dataclass(frozen=True)
class TraceRow:
    phase: str
    t_start: float
    t_end: float
    cell: int | None = None
    v_mac: float | None = None
    t_d: float | None = None
    d_i: int | None = None


TRACE_HEADER = ["phase", "t_start_s", "t_end_s", "cell", "v_mac_v", "t_d_s", "d_i"]


def quantize(t: float, t_clk: float) -> int:
    """Counter reading for an interval ``t``: floor(t / t_clk), never over-counting."""
    d = math.floor(t / t_clk)
    # the division can round across an integer; fix so d*T <= t < (d+1)*T
    if d * t_clk > t:
        d -= 1
    elif (d + 1) * t_clk <= t:
        d += 1
    return d


def quantize_array(t: np.ndarray, t_clk: float) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    d = np.floor(t / t_clk)
    d -= d * t_clk > t
    d += (d + 1) * t_clk <= t
    return d.astype(np.int64)


def check_arch(arch: str) -> str:
    if arch not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {arch!r}; expected one of {ARCHITECTURES}")
    return arch


def multiplication_time(params: CircuitParams) -> float:
    # synchronous controller: always allots the full 15-slot pulse window
    return params.max_code * params.t_clk_pulse


def reset_time(params: CircuitParams) -> float:
    return params.t_clk_pulse


def counter_accumulation_time(params: CircuitParams, n: int) -> float:
    return n * params.t_meas + params.t_ctrl


def max_cell_delay(params: CircuitParams) -> float:
    """Largest single-cell delay reachable with ideal 4-bit operands."""
    products = {x * w for x in range(params.max_code + 1) for w in range(params.max_code + 1)}
    volts = {min(p * params.volts_per_product, params.v_sat) for p in products}
    return max(cell_delay(v, params).t_d for v in volts)


def latency_model(arch: str, params: CircuitParams, n: int) -> float:
    """Worst-case latency of one MAC over the whole operand space."""
    if n < 1:
        raise ValueError("n must be >= 1")
    check_arch(arch)
    if arch == "cascade":
        accumulate = n * max_cell_delay(params)
    else:
        accumulate = counter_accumulation_time(params, n)
    return multiplication_time(params) + accumulate + reset_time(params)


class MacEngine:
    """One simulator instance: a DAC with frozen mismatch plus a noise stream.

    Instances built from the same ``(params, seed, instance)`` are identical.
    After every run the capacitor state is reset to zero.
    """

    def __init__(self, params: CircuitParams | None = None, seed: int | None = None,
                 instance: int = 0):
        self.params = check_params(params if params is not None else default_params())
        self.seed = self.params.seed if seed is None else int(seed)
        self.instance = instance
        self.dac = frontend.CurrentSteeringDac(
            self.params, rng_for(self.seed, instance, MISMATCH_STREAM)
        )
        self.rng = rng_for(self.seed, instance, NOISE_STREAM)
        self.samples: list[frontend.AnalogSample] = []
        self.trace: list[TraceRow] = []

    # --- phases ----------------------------------------------------------

    def run_multiplication_phase(self, ops: VectorOperands,
                                 rng: np.random.Generator | None = None) -> list[frontend.AnalogSample]:
        p = self.params
        rng = self.rng if rng is None else rng
        samples = []
        for i, (x, w) in enumerate(zip(ops.inputs, ops.weights)):
            pulses = pulsegen.pulse_train(x, p.t_clk_pulse)
            dac = self.dac.current(w)
            samples.append(frontend.integrate(dac, pulses, p, rng, cell_index=i))
        self.samples = samples
        return samples

    def _energy(self, ops: VectorOperands, t_active: float) -> float:
        p = self.params
        currents = [self.dac.current(w).current for w in ops.weights]
        durations = [x * p.t_clk_pulse for x in ops.inputs]
        return analog_energy(currents, durations, p.v_dd) + counter_energy(p, t_active)

    def _delays(self, samples) -> list[float]:
        return [cell_delay(s.v_mac, self.params, s.cell_index).t_d for s in samples]

    def _finish(self, samples):
        self.samples = frontend.reset_phase(samples)

    def run_cascade(self, ops: VectorOperands, rng: np.random.Generator | None = None) -> MacReadout:
        p = self.params
        samples = self.run_multiplication_phase(ops, rng)
        delays = self._delays(samples)
        t_acc = cascade_delay(samples, p)
        d_out = quantize(t_acc, p.t_clk_tdc)
        t_mult = multiplication_time(p)
        latency = t_mult + t_acc + reset_time(p)
        self.trace = [TraceRow("multiplication", 0.0, t_mult)]
        t = t_mult
        for s, t_d in zip(samples, delays):
            self.trace.append(TraceRow("cell", t, t + t_d, s.cell_index, s.v_mac, t_d))
            t += t_d
        self.trace += [TraceRow("accumulation", t_mult, t_mult + t_acc),
                       TraceRow("reset", t_mult + t_acc, latency)]
        readout = MacReadout(
            architecture="cascade",
            d_out=d_out,
            t_acc=t_acc,
            oracle=oracle_mac(ops),
            latency=latency,
            energy=self._energy(ops, t_acc),
            saturated_cells=tuple(s.cell_index for s in samples if s.saturated),
            cell_delays=tuple(delays),
        )
        self._finish(samples)
        return readout

    def run_counter(self, ops: VectorOperands, rng: np.random.Generator | None = None) -> MacReadout:
        p = self.params
        samples = self.run_multiplication_phase(ops, rng)
        delays = self._delays(samples)
        # control logic selects each cell in turn; the counter runs for one
        # measurement window per cell
        counts = [quantize(t_d, p.t_clk_tdc) for t_d in delays]
        t_mult = multiplication_time(p)
        t_accum = counter_accumulation_time(p, ops.n)
        latency = t_mult + t_accum + reset_time(p)
        self.trace = [TraceRow("multiplication", 0.0, t_mult)]
        for k, (s, t_d, d_i) in enumerate(zip(samples, delays, counts)):
            start = t_mult + k * p.t_meas
            self.trace.append(TraceRow("cell", start, start + t_d, s.cell_index, s.v_mac, t_d, d_i))
        self.trace += [TraceRow("accumulation", t_mult, t_mult + t_accum),
                       TraceRow("reset", t_mult + t_accum, latency)]
        readout = MacReadout(
            architecture="counter",
            d_out=sum(counts),
            t_acc=math.fsum(delays),
            oracle=oracle_mac(ops),
            latency=latency,
            energy=self._energy(ops, t_accum),
            saturated_cells=tuple(s.cell_index for s in samples if s.saturated),
            cell_delays=tuple(delays),
            cell_counts=tuple(counts),
        )
        self._finish(samples)
        return readout

    def run(self, ops: VectorOperands, arch: str = "cascade",
            rng: np.random.Generator | None = None) -> MacReadout:
        check_arch(arch)
        try:
            if arch == "cascade":
                return self.run_cascade(ops, rng)
            return self.run_counter(ops, rng)
        except CutoffError:
            self.samples = frontend.reset_phase(self.samples)
            raise


def run_multiplication_phase(ops: VectorOperands, params: CircuitParams | None = None,
                             rng: np.random.Generator | None = None) -> list[frontend.AnalogSample]:
    return MacEngine(params).run_multiplication_phase(ops, rng)


def run_cascade(ops: VectorOperands, params: CircuitParams | None = None,
                rng: np.random.Generator | None = None) -> MacReadout:
    return MacEngine(params).run_cascade(ops, rng)


def run_counter(ops: VectorOperands, params: CircuitParams | None = None,
                rng: np.random.Generator | None = None) -> MacReadout:
    return MacEngine(params).run_counter(ops, rng)
