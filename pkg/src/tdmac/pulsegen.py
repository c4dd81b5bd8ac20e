"""Cycle-accurate model of the N-pulse generator control block.

The block holds a 4-bit counter, a 4-bit input register, a comparator and a
compare-valid flag. Each call to :func:`step` is one rising clock edge.

Edge semantics:

* the first edge after reset latches the input code and raises ``cmp_valid``;
  the counter does not move on that edge;
* on later edges, if ``enable`` is high and ``match_out`` is still high, the
  counter increments (one emitted pulse);
* after the update, if ``cmp_valid`` and ``counter == reg_code`` the match
  output drops and stays low until the next reset.

So code ``k`` yields exactly ``k`` counter increments while ``match_out`` is
high, and code 0 drops ``match_out`` on the latch edge itself. Before the
latch, ``cmp_valid`` is low, so the reset state 0 == 0 never matches.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Iterable, TextIO

from .validation import check_code

COUNTER_MASK = 0xF


@dataclass(frozen=True)
class PulseGenState:
    counter: int = 0
    reg_code: int = 0
    match_out: bool = True
    cmp_valid: bool = False
    cycle_index: int = 0


@dataclass(frozen=True)
class PulseTrain:
    n_pulses: int
    t_unit: float
    duration: float


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    enable: bool
    counter: int
    match_out: bool
    pulse: bool


def reset(state: PulseGenState | None = None) -> PulseGenState:
    return PulseGenState()


def step(state: PulseGenState, enable: bool, code: int) -> PulseGenState:
    code = check_code(code)
    cycle = state.cycle_index + 1
    if not state.cmp_valid:
        latched = replace(state, reg_code=code, cmp_valid=True, cycle_index=cycle)
        return replace(latched, match_out=latched.counter != latched.reg_code)

    counter = state.counter
    if enable and state.match_out:
        counter = (counter + 1) & COUNTER_MASK
    match_out = state.match_out and counter != state.reg_code
    return replace(state, counter=counter, match_out=match_out, cycle_index=cycle)


def simulate(code: int, enable: Iterable[bool] | None = None, n_cycles: int = 18) -> list[CycleRecord]:
    """Reset, then clock the block and record every edge.

    ``enable`` defaults to held high for ``n_cycles`` edges. A pulse is
    counted on each edge where the counter advanced.
    """
    if enable is None:
        enable = [True] * n_cycles
    state = reset()
    trace = []
    for en in enable:
        nxt = step(state, bool(en), code)
        pulse = state.cmp_valid and nxt.counter != state.counter
        trace.append(CycleRecord(nxt.cycle_index, bool(en), nxt.counter, nxt.match_out, pulse))
        state = nxt
    return trace


def count_pulses(code: int, n_cycles: int = 18) -> int:
    """Number of enabled cycles with the match output high, from the FSM."""
    return sum(r.pulse for r in simulate(code, n_cycles=n_cycles))


def pulse_train(code: int, t_clk: float) -> PulseTrain:
    code = check_code(code)
    if not t_clk > 0:
        raise ValueError("t_clk must be positive")
    return PulseTrain(n_pulses=code, t_unit=t_clk, duration=code * t_clk)


def write_waveform(trace: Iterable[CycleRecord], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["cycle", "enable", "counter", "match_out"])
    for r in trace:
        writer.writerow([r.cycle, int(r.enable), r.counter, int(r.match_out)])
